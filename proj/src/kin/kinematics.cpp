#include "pitchstats/kin/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace pitchstats::kin {

namespace {

// Angle of the elbow-relative wrist position in the x/y plane. Returns
// false when the radius vanishes and the angle is undefined.
bool relative_angle(const WristTrajectory& traj, Index frame, Scalar* angle) {
  const Scalar dx = traj.wrist(frame, 0) - traj.elbow(frame, 0);
  const Scalar dy = traj.wrist(frame, 1) - traj.elbow(frame, 1);
  if (dx == 0.0 && dy == 0.0) return false;
  *angle = std::atan2(dy, dx);
  return true;
}

Scalar wrap_angle(Scalar delta) {
  // remainder() lands in [-pi, pi]; the boundary sign is irrelevant because
  // every consumer takes the absolute value.
  return std::remainder(delta, 2.0 * std::numbers::pi_v<Scalar>);
}

}  // namespace

void WristTrajectory::validate() const {
  if (wrist.rows() < 3) {
    throw ValidationError("wrist trajectory needs at least 3 frames, got " +
                          std::to_string(wrist.rows()));
  }
  if (elbow.rows() != wrist.rows()) {
    throw ValidationError("wrist/elbow frame counts differ: " +
                          std::to_string(wrist.rows()) + " vs " +
                          std::to_string(elbow.rows()));
  }
  if (!wrist.allFinite() || !elbow.allFinite()) {
    throw ValidationError("wrist trajectory has non-finite coordinates");
  }
  if (!std::isfinite(fps) || fps <= 0.0) {
    throw ValidationError("fps must be finite and positive");
  }
}

void VelocityInputs::validate() const {
  if (!wrist_prev.allFinite() || !wrist_at.allFinite()) {
    throw ValidationError("velocity inputs have non-finite coordinates");
  }
  if (!std::isfinite(fps) || fps <= 0.0) {
    throw ValidationError("fps must be finite and positive");
  }
  if (!std::isfinite(lever_arm) || lever_arm <= 0.0) {
    throw ValidationError("lever arm must be finite and positive");
  }
}

Scalar pitch_velocity(const VelocityInputs& v) {
  v.validate();
  if (v.wrist_prev.isZero(0.0) || v.wrist_at.isZero(0.0)) {
    throw UndefinedAngleError(
        "wrist coincident with elbow: rotation angle undefined");
  }
  const Scalar theta_prev = std::atan2(v.wrist_prev.y(), v.wrist_prev.x());
  const Scalar theta_at = std::atan2(v.wrist_at.y(), v.wrist_at.x());
  return std::abs(wrap_angle(theta_at - theta_prev)) * v.fps * v.lever_arm;
}

VelocityInputs velocity_inputs(const WristTrajectory& traj, Index release_frame,
                               Scalar lever_arm) {
  traj.validate();
  if (release_frame < 1 || release_frame >= traj.n_frames()) {
    throw ValidationError("release frame " + std::to_string(release_frame) +
                          " out of range [1, " +
                          std::to_string(traj.n_frames() - 1) + "]");
  }
  VelocityInputs v;
  const Eigen::RowVector3d rel_prev =
      traj.wrist.row(release_frame - 1) - traj.elbow.row(release_frame - 1);
  const Eigen::RowVector3d rel_at =
      traj.wrist.row(release_frame) - traj.elbow.row(release_frame);
  v.wrist_prev = rel_prev.head<2>().transpose();
  v.wrist_at = rel_at.head<2>().transpose();
  v.fps = traj.fps;
  v.lever_arm = lever_arm;
  return v;
}

Scalar median_lever_arm(const WristTrajectory& traj) {
  traj.validate();
  std::vector<Scalar> dist(static_cast<std::size_t>(traj.n_frames()));
  for (Index t = 0; t < traj.n_frames(); ++t) {
    dist[static_cast<std::size_t>(t)] =
        (traj.wrist.row(t) - traj.elbow.row(t)).norm();
  }
  const std::size_t mid = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + static_cast<long>(mid),
                   dist.end());
  Scalar median = dist[mid];
  if (dist.size() % 2 == 0) {
    // Even count: average the two central order statistics.
    const Scalar below =
        *std::max_element(dist.begin(), dist.begin() + static_cast<long>(mid));
    median = 0.5 * (below + median);
  }
  return median;
}

Scalar release_extension(const Vector3& wrist, const Vector3& ankle) {
  if (!wrist.allFinite() || !ankle.allFinite()) {
    throw ValidationError("extension inputs must be finite");
  }
  return (wrist - ankle).norm();
}

ReleaseEvent detect_release_event(const WristTrajectory& traj, int window_n) {
  traj.validate();
  const Index n = traj.n_frames();
  if (window_n < 1 || window_n > static_cast<int>(n / 2)) {
    throw ValidationError("window_n must lie in [1, " + std::to_string(n / 2) +
                          "], got " + std::to_string(window_n));
  }

  // Orient x so that "toward the plate" is always the positive direction;
  // a left-hander's delivery is the x-mirror of a right-hander's.
  const Scalar sign =
      traj.handedness == pose::Handedness::right ? 1.0 : -1.0;
  const ArrayX x = sign * traj.wrist.col(0).array();

  if ((x == x[0]).all()) {
    throw NoMotionError("wrist x-coordinate is constant; no pitch motion");
  }

  // Points A and B are the *interior* extremes: earliest interior argmin
  // (cocking-phase retreat) and earliest interior argmax (end of
  // acceleration). An extreme attained only at a boundary means the motion
  // is cut off mid-phase and no release geometry exists.
  Index frame_a = 1;
  Index frame_b = 1;
  for (Index t = 2; t + 1 < n; ++t) {
    if (x[t] < x[frame_a]) frame_a = t;
    if (x[t] > x[frame_b]) frame_b = t;
  }
  if (!(x[frame_a] < x[0] && x[frame_a] < x[n - 1])) {
    throw DegenerateTrajectoryError(
        "no interior minimum in wrist x: trajectory lacks a cocking phase");
  }
  if (!(x[frame_b] > x[0] && x[frame_b] > x[n - 1])) {
    throw DegenerateTrajectoryError(
        "no interior maximum in wrist x: trajectory lacks a release phase");
  }

  // Release: the peak instantaneous pitch velocity among frames windowed on
  // point B. The lever arm and fps scale every candidate identically, so
  // ranking by the wrapped angle step is equivalent; candidates whose
  // elbow-relative radius vanishes carry no angle and are skipped.
  const Index lo = std::max<Index>(1, frame_b - window_n);
  const Index hi = std::min<Index>(n - 1, frame_b + window_n);
  Index release = -1;
  Scalar best = -1.0;
  for (Index t = lo; t <= hi; ++t) {
    Scalar th_prev = 0.0;
    Scalar th_at = 0.0;
    if (!relative_angle(traj, t - 1, &th_prev) ||
        !relative_angle(traj, t, &th_at)) {
      continue;
    }
    const Scalar step = std::abs(wrap_angle(th_at - th_prev));
    if (step > best) {
      best = step;
      release = t;
    }
  }
  if (release < 0) {
    throw DegenerateTrajectoryError(
        "wrist coincident with elbow throughout the release window");
  }

  ReleaseEvent event;
  event.frame_a = frame_a;
  event.frame_b = frame_b;
  event.release_frame = release;
  event.window_n = window_n;
  return event;
}

}  // namespace pitchstats::kin
