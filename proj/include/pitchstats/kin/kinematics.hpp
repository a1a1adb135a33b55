#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pitchstats/error.hpp"
#include "pitchstats/pose/joints.hpp"
#include "pitchstats/types.hpp"

namespace pitchstats::kin {

// Wrist x-coordinate has no interior extreme on the required side (e.g. a
// monotonic ramp): no cocking/release geometry exists.
struct DegenerateTrajectoryError : NumericError {
  using NumericError::NumericError;
};

// All wrist x-coordinates equal: nothing moves.
struct NoMotionError : NumericError {
  using NumericError::NumericError;
};

// Wrist coincident with the elbow: the elbow-relative angle is undefined.
struct UndefinedAngleError : NumericError {
  using NumericError::NumericError;
};

inline constexpr Scalar kMpsToMph = 2.236936;  // 3600 / 1609.344
inline constexpr int kDefaultWindow = 5;

// Throwing-arm track: absolute wrist and elbow positions per frame. The
// elbow is carried alongside the wrist because the velocity lever pivots at
// the elbow, so every angular quantity is computed elbow-relative.
struct WristTrajectory {
  MatrixX3R wrist;   // N x 3, meters
  MatrixX3R elbow;   // N x 3, meters
  Scalar fps = 30.0;
  pose::Handedness handedness = pose::Handedness::right;

  Index n_frames() const { return wrist.rows(); }
  void validate() const;  // N >= 3, matching sizes, finite, fps > 0
};

// Wrist x-extremes bracketing the delivery: Point A ends the cocking phase
// (glove-side extreme), Point B ends acceleration (plate-side extreme).
struct ReleaseEvent {
  Index frame_a = 0;
  Index frame_b = 0;
  Index release_frame = 0;  // argmax of pitch velocity near B
  int window_n = kDefaultWindow;
};

// Elbow-relative wrist coordinates (x, y) at the release frame and the one
// before it. lever_arm is the wrist-to-elbow distance; analyze_pitch
// estimates it as the median of per-frame distances, which equals the
// at-release distance on clean data and resists per-frame noise.
struct VelocityInputs {
  Vector2 wrist_prev = Vector2::Zero();
  Vector2 wrist_at = Vector2::Zero();
  Scalar fps = 30.0;       // T of the angular-to-linear conversion
  Scalar lever_arm = 0.3;  // l, meters

  void validate() const;  // fps > 0, lever_arm > 0, finite
};

// Finds Points A and B as the earliest interior frames attaining the
// handedness-appropriate x-extremes (right: A = min, B = max; mirrored for
// left), then picks the release frame as the earliest velocity argmax over
// [B - n, B + n] ∩ [1, N-1]. Candidates whose elbow-relative radius
// vanishes are skipped.
ReleaseEvent detect_release_event(const WristTrajectory& traj,
                                  int window_n = kDefaultWindow);

// Angular wrist speed about the elbow converted to linear speed:
// |wrap(atan2 difference)| * fps * lever_arm, wrap to (-pi, pi].
Scalar pitch_velocity(const VelocityInputs& v);

// Convenience builder: elbow-relative (x, y) pairs at frames r-1 and r.
VelocityInputs velocity_inputs(const WristTrajectory& traj, Index release_frame,
                               Scalar lever_arm);

// Median over frames of the 3-d wrist-to-elbow distance.
Scalar median_lever_arm(const WristTrajectory& traj);

// Euclidean wrist-to-ankle distance at release.
Scalar release_extension(const Vector3& wrist, const Vector3& ankle);

}  // namespace pitchstats::kin
