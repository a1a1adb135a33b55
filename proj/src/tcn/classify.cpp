#include "pitchstats/tcn/classify.hpp"

#include "pitchstats/error.hpp"

namespace pitchstats::tcn {

namespace {

nn::Tensor single_prediction(const TcnModel& model,
                             const pose::PoseSequence& sequence, Head expected,
                             const char* task) {
  if (model.config().head != expected) {
    throw ValidationError(std::string(task) +
                          " needs a model with the matching head");
  }
  sequence.validate();
  const pose::PoseBatch batch =
      pose::make_batch({sequence}, model.config().seq_len);
  return model.predict(to_input_tensor(batch));
}

}  // namespace

RoleResult classify_role(const TcnModel& model, const pose::PoseSequence& sequence) {
  const nn::Tensor probs =
      single_prediction(model, sequence, Head::role4, "classify_role");
  RoleResult result;
  int best = 0;
  for (int c = 0; c < pose::kNumRoles; ++c) {
    result.distribution[static_cast<std::size_t>(c)] = probs.at(0, c);
    if (probs.at(0, c) > probs.at(0, best)) best = c;
  }
  result.role = static_cast<pose::Role>(best);
  return result;
}

HandednessResult classify_handedness(const TcnModel& model,
                                     const pose::PoseSequence& sequence) {
  const nn::Tensor probs =
      single_prediction(model, sequence, Head::binary, "classify_handedness");
  const Scalar p_left = probs.at(0, 0);
  HandednessResult result;
  result.handedness =
      p_left > Scalar(0.5) ? pose::Handedness::left : pose::Handedness::right;
  result.confidence =
      result.handedness == pose::Handedness::left ? p_left : Scalar(1) - p_left;
  return result;
}

PitchPositionResult classify_pitch_position(const TcnModel& model,
                                            const pose::PoseSequence& sequence) {
  const nn::Tensor probs = single_prediction(model, sequence, Head::binary,
                                             "classify_pitch_position");
  const Scalar p_stretch = probs.at(0, 0);
  PitchPositionResult result;
  result.position = p_stretch > Scalar(0.5) ? pose::PitchPosition::stretch
                                            : pose::PitchPosition::windup;
  result.confidence = result.position == pose::PitchPosition::stretch
                          ? p_stretch
                          : Scalar(1) - p_stretch;
  return result;
}

}  // namespace pitchstats::tcn
