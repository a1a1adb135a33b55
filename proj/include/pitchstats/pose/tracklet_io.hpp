#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pitchstats/pose/sequence.hpp"

namespace pitchstats::pose {

// Tracklet JSONL: a header line {"format": "pose-tracklet", "version": 1}
// followed by one record object per line:
//
//   {"tracklet_id": str, "fps": num, "joint_names": [str x 17],
//    "frames": [[[x,y,z] x 17] x N], "valid_mask": [[bool x 17] x N]?}
//
// joint_names may list the joints in any order; records are reordered to
// canonical JointId order on load. valid_mask is omitted when all joints are
// valid. Numbers round-trip bit-exactly.

// Strict reader: the first malformed record aborts the load. Errors carry
// the 1-based line number.
std::vector<PoseSequence> load_tracklets(const std::string& path);

// Writes sequences (all validated first) in the format above.
void save_tracklets(const std::vector<PoseSequence>& sequences,
                    const std::string& path);

// Lenient streaming reader: on_record per good record; on_error receives the
// line number and message for each bad record and returns whether to keep
// going. Header errors always abort (throw).
void for_each_tracklet(
    const std::string& path,
    const std::function<void(PoseSequence)>& on_record,
    const std::function<bool(long line, const std::string& message)>& on_error);

}  // namespace pitchstats::pose
