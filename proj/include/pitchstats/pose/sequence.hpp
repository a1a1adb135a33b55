#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pitchstats/pose/joints.hpp"
#include "pitchstats/types.hpp"

namespace pitchstats::pose {

using JointMatrix =
    Eigen::Matrix<Scalar, kNumJoints, kNumCoords, Eigen::RowMajor>;

// One skeleton observation. Joints with valid_mask false carry no
// information and are excluded from every downstream computation.
struct PoseFrame {
  JointMatrix joints = JointMatrix::Zero();
  std::array<bool, kNumJoints> valid_mask = all_valid_mask();

  static std::array<bool, kNumJoints> all_valid_mask() {
    std::array<bool, kNumJoints> mask;
    mask.fill(true);
    return mask;
  }

  Vector3 joint(JointId id) const {
    return joints.row(static_cast<Index>(id)).transpose();
  }
  void set_joint(JointId id, const Vector3& p) {
    joints.row(static_cast<Index>(id)) = p.transpose();
  }
  bool joint_valid(JointId id) const {
    return valid_mask[static_cast<std::size_t>(id)];
  }

  bool operator==(const PoseFrame& other) const {
    return joints == other.joints && valid_mask == other.valid_mask;
  }
};

// A tracklet: uniformly sampled frames attributed to one player.
struct PoseSequence {
  std::string tracklet_id;
  Scalar fps = 30.0;
  std::vector<PoseFrame> frames;

  Index n_frames() const { return static_cast<Index>(frames.size()); }

  const PoseFrame& frame(Index n) const {
    return frames[static_cast<std::size_t>(n)];
  }
  PoseFrame& frame(Index n) { return frames[static_cast<std::size_t>(n)]; }

  Vector3 joint(Index n, JointId id) const { return frame(n).joint(id); }

  // Throws ValidationError unless N >= 1, fps is finite and positive, and
  // every valid joint coordinate is finite.
  void validate() const;

  bool operator==(const PoseSequence& other) const {
    return tracklet_id == other.tracklet_id && fps == other.fps &&
           frames == other.frames;
  }
};

// Anatomical mirror: negates x and swaps left/right joint labels (and their
// validity flags), so a right-handed motion becomes its left-handed twin.
PoseSequence mirror_x(const PoseSequence& sequence);

// Sequences brought to a common length: shorter ones are zero-padded at the
// end (pad_mask false, joints invalid), longer ones center-cropped.
struct PoseBatch {
  std::vector<PoseSequence> sequences;
  std::vector<std::vector<bool>> pad_mask;  // B x N, true for real frames
  Index seq_len = 0;

  Index size() const { return static_cast<Index>(sequences.size()); }
};

PoseBatch make_batch(const std::vector<PoseSequence>& sequences, Index target_len);

}  // namespace pitchstats::pose
