#include "pitchstats/kin/analyze.hpp"

#include <string>
#include <vector>

#include "pitchstats/pose/joints.hpp"
#include "pitchstats/tcn/classify.hpp"

namespace pitchstats::kin {

namespace {

constexpr const char* kKinematicFields[] = {
    "release_frame", "release_point_3d", "pitch_velocity",
    "release_extension"};

struct ValidRun {
  Index begin = 0;  // inclusive
  Index end = 0;    // exclusive
  Index length() const { return end - begin; }
};

// Longest contiguous run of frames where wrist, elbow, and ankle are all
// tracked. Kinematics run on one unbroken window so that frame-to-frame
// differences never straddle an occlusion gap.
ValidRun longest_valid_run(const pose::PoseSequence& seq, pose::JointId wrist,
                           pose::JointId elbow, pose::JointId ankle) {
  ValidRun best;
  ValidRun current;
  const Index n = seq.n_frames();
  for (Index t = 0; t < n; ++t) {
    const pose::PoseFrame& frame = seq.frames[static_cast<std::size_t>(t)];
    const bool ok = frame.joint_valid(wrist) && frame.joint_valid(elbow) &&
                    frame.joint_valid(ankle);
    if (ok) {
      if (current.length() == 0) current.begin = t;
      current.end = t + 1;
      if (current.length() > best.length()) best = current;
    } else {
      current = ValidRun{};
    }
  }
  return best;
}

void fail_kinematics(PitchReport* report, const std::string& reason) {
  for (const char* field : kKinematicFields) {
    report->field_errors.push_back({field, reason});
  }
}

}  // namespace

PitchReport analyze_pitch(const pose::PoseSequence& sequence,
                          const tcn::TcnModel& handedness_model,
                          const tcn::TcnModel& position_model,
                          const AnalyzeConfig& config) {
  sequence.validate();

  PitchReport report;
  report.tracklet_id = sequence.tracklet_id;

  const tcn::HandednessResult hand =
      tcn::classify_handedness(handedness_model, sequence);
  report.handedness = hand.handedness;
  report.confidences["handedness"] = hand.confidence;

  const tcn::PitchPositionResult pos =
      tcn::classify_pitch_position(position_model, sequence);
  report.pitch_position = pos.position;
  report.confidences["pitch_position"] = pos.confidence;

  const pose::JointId wrist = pose::throwing_wrist(hand.handedness);
  const pose::JointId elbow = pose::throwing_elbow(hand.handedness);
  const pose::JointId ankle = pose::pitching_ankle(hand.handedness);

  const ValidRun run = longest_valid_run(sequence, wrist, elbow, ankle);
  if (run.length() < 3) {
    fail_kinematics(&report,
                    "fewer than 3 consecutive frames with wrist, elbow, and "
                    "ankle all tracked");
    return report;
  }
  const Scalar valid_fraction =
      static_cast<Scalar>(run.length()) / static_cast<Scalar>(sequence.n_frames());

  WristTrajectory traj;
  traj.wrist.resize(run.length(), 3);
  traj.elbow.resize(run.length(), 3);
  for (Index t = 0; t < run.length(); ++t) {
    traj.wrist.row(t) = sequence.joint(run.begin + t, wrist).transpose();
    traj.elbow.row(t) = sequence.joint(run.begin + t, elbow).transpose();
  }
  traj.fps = sequence.fps;
  traj.handedness = hand.handedness;

  ReleaseEvent event;
  try {
    event = detect_release_event(traj, config.window_n);
  } catch (const Error& e) {
    fail_kinematics(&report, e.what());
    return report;
  }

  const Index release = run.begin + event.release_frame;
  report.release_frame = release;
  report.frame_a = run.begin + event.frame_a;
  report.frame_b = run.begin + event.frame_b;
  report.confidences["release_frame"] = valid_fraction;
  if (!(event.frame_a < event.frame_b)) {
    report.warnings.push_back(
        "point A does not precede point B; delivery phases out of order");
  }

  report.release_point_3d = sequence.joint(release, wrist);
  report.confidences["release_point_3d"] = valid_fraction;

  try {
    const Scalar lever = median_lever_arm(traj);
    const Scalar mps =
        pitch_velocity(velocity_inputs(traj, event.release_frame, lever));
    report.pitch_velocity_mps = mps;
    report.pitch_velocity_mph = mps * kMpsToMph;
    report.confidences["pitch_velocity"] = valid_fraction;
  } catch (const Error& e) {
    report.field_errors.push_back({"pitch_velocity", e.what()});
  }

  report.wrist_speed3d_mps =
      (sequence.joint(release, wrist) - sequence.joint(release - 1, wrist))
          .norm() *
      sequence.fps;

  report.release_extension_m = release_extension(
      sequence.joint(release, wrist), sequence.joint(release, ankle));
  report.confidences["release_extension"] = valid_fraction;

  return report;
}

}  // namespace pitchstats::kin
