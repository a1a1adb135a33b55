#pragma once

#include <array>

#include "pitchstats/tcn/model.hpp"

namespace pitchstats::tcn {

// Single-sequence classification. The sequence is padded/cropped to the
// model's seq_len first. Argmax ties resolve to the lowest class index;
// binary scores of exactly 0.5 resolve to the majority class (right-handed,
// windup).

struct RoleResult {
  pose::Role role = pose::Role::pitcher;
  std::array<Scalar, pose::kNumRoles> distribution{};
};

struct HandednessResult {
  pose::Handedness handedness = pose::Handedness::right;
  Scalar confidence = 0;  // probability of the predicted side, in (0, 1)
};

struct PitchPositionResult {
  pose::PitchPosition position = pose::PitchPosition::windup;
  Scalar confidence = 0;
};

// Requires a role4-head model.
RoleResult classify_role(const TcnModel& model, const pose::PoseSequence& sequence);

// Requires binary-head models trained with label 1 = left / 1 = stretch.
HandednessResult classify_handedness(const TcnModel& model,
                                     const pose::PoseSequence& sequence);
PitchPositionResult classify_pitch_position(const TcnModel& model,
                                            const pose::PoseSequence& sequence);

}  // namespace pitchstats::tcn
