#include "pitchstats/pose/sequence.hpp"

#include <cmath>
#include <string>

#include "pitchstats/error.hpp"

namespace pitchstats::pose {

void PoseSequence::validate() const {
  if (frames.empty()) {
    throw ValidationError("sequence '" + tracklet_id + "' has no frames");
  }
  if (!std::isfinite(fps) || fps <= 0) {
    throw ValidationError("sequence '" + tracklet_id + "' has invalid fps");
  }
  for (std::size_t n = 0; n < frames.size(); ++n) {
    const PoseFrame& f = frames[n];
    for (int k = 0; k < kNumJoints; ++k) {
      if (!f.valid_mask[static_cast<std::size_t>(k)]) continue;
      for (int c = 0; c < kNumCoords; ++c) {
        if (!std::isfinite(f.joints(k, c))) {
          throw ValidationError("sequence '" + tracklet_id + "' frame " +
                                std::to_string(n) + " joint " +
                                joint_name(static_cast<JointId>(k)) +
                                " has a non-finite coordinate");
        }
      }
    }
  }
}

PoseSequence mirror_x(const PoseSequence& sequence) {
  PoseSequence out = sequence;
  for (std::size_t n = 0; n < sequence.frames.size(); ++n) {
    const PoseFrame& src = sequence.frames[n];
    PoseFrame& dst = out.frames[n];
    for (int k = 0; k < kNumJoints; ++k) {
      const int m = static_cast<int>(mirror_joint(static_cast<JointId>(k)));
      dst.joints(m, 0) = -src.joints(k, 0);
      dst.joints(m, 1) = src.joints(k, 1);
      dst.joints(m, 2) = src.joints(k, 2);
      dst.valid_mask[static_cast<std::size_t>(m)] =
          src.valid_mask[static_cast<std::size_t>(k)];
    }
  }
  return out;
}

PoseBatch make_batch(const std::vector<PoseSequence>& sequences, Index target_len) {
  if (target_len < 1) throw ValidationError("batch target length must be >= 1");
  PoseBatch batch;
  batch.seq_len = target_len;
  batch.sequences.reserve(sequences.size());
  batch.pad_mask.reserve(sequences.size());
  for (const PoseSequence& seq : sequences) {
    seq.validate();
    PoseSequence fitted;
    fitted.tracklet_id = seq.tracklet_id;
    fitted.fps = seq.fps;
    std::vector<bool> mask(static_cast<std::size_t>(target_len), true);
    const Index n = seq.n_frames();
    if (n >= target_len) {
      const Index start = (n - target_len) / 2;
      fitted.frames.assign(seq.frames.begin() + start,
                           seq.frames.begin() + start + target_len);
    } else {
      fitted.frames = seq.frames;
      fitted.frames.resize(static_cast<std::size_t>(target_len));
      for (Index t = n; t < target_len; ++t) {
        PoseFrame& pad = fitted.frames[static_cast<std::size_t>(t)];
        pad.joints.setZero();
        pad.valid_mask.fill(false);
        mask[static_cast<std::size_t>(t)] = false;
      }
    }
    batch.sequences.push_back(std::move(fitted));
    batch.pad_mask.push_back(std::move(mask));
  }
  return batch;
}

}  // namespace pitchstats::pose
