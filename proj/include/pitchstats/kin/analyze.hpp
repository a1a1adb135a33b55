#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pitchstats/kin/kinematics.hpp"
#include "pitchstats/pose/sequence.hpp"
#include "pitchstats/tcn/model.hpp"
#include "pitchstats/types.hpp"

namespace pitchstats::kin {

// A statistic that could not be computed, with the field left null in the
// report. One failed statistic never voids the others.
struct FieldError {
  std::string field;
  std::string reason;
};

struct AnalyzeConfig {
  int window_n = kDefaultWindow;  // release search half-width around Point B
};

// Full per-tracklet result. Classification fields come from the TCN heads;
// kinematic fields from the closed-form release analysis. Every field is
// either populated or null with a matching entry in field_errors.
// Frame indices refer to the original sequence.
struct PitchReport {
  std::string tracklet_id;

  std::optional<pose::Handedness> handedness;
  std::optional<pose::PitchPosition> pitch_position;

  std::optional<Index> release_frame;
  std::optional<Index> frame_a;  // cocking-phase extreme (diagnostic)
  std::optional<Index> frame_b;  // acceleration-end extreme (diagnostic)
  std::optional<Vector3> release_point_3d;       // meters
  std::optional<Scalar> pitch_velocity_mps;      // planar lever formula
  std::optional<Scalar> pitch_velocity_mph;      // mps * 2.236936
  std::optional<Scalar> release_extension_m;     // wrist-to-ankle at release
  std::optional<Scalar> wrist_speed3d_mps;       // auxiliary: 3-d chord speed

  // Keyed by field name. Classifier fields carry the head probability of
  // the predicted class; kinematic fields carry the fraction of frames with
  // all three throwing-side joints valid.
  std::map<std::string, Scalar> confidences;
  std::vector<FieldError> field_errors;
  std::vector<std::string> warnings;
};

// Classifies handedness, extracts the throwing-side wrist/elbow/ankle
// track, locates the release, and evaluates velocity and extension, then
// classifies the pitch position. Kinematic failures (frozen pose, motion
// cut off mid-phase, occluded joints) null the affected fields and record
// the reason; classification always runs.
PitchReport analyze_pitch(const pose::PoseSequence& sequence,
                          const tcn::TcnModel& handedness_model,
                          const tcn::TcnModel& position_model,
                          const AnalyzeConfig& config = {});

}  // namespace pitchstats::kin
