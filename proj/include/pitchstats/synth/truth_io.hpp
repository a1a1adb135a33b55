#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pitchstats/pose/joints.hpp"
#include "pitchstats/synth/synthgen.hpp"
#include "pitchstats/types.hpp"

namespace pitchstats::synth {

// Ground truth for one generated tracklet, as stored in the sidecar file.
// Kinematic fields exist only for pitcher sequences; the other roles carry
// just the role label.
struct TruthRecord {
  std::string tracklet_id;
  pose::Role role = pose::Role::pitcher;
  std::optional<pose::Handedness> handedness;
  std::optional<pose::PitchPosition> position_style;
  std::optional<Index> release_frame;
  std::optional<Scalar> release_speed_mps;
  std::optional<Scalar> extension_m;
  std::optional<Vector3> release_point;
};

TruthRecord to_truth_record(const std::string& tracklet_id,
                            const PitchTruth& truth);

// Sidecar JSONL: a {"format": "pitch-truth", "version": 1, ...extra} header
// (extra carries the emitting tool's version and config echo) followed by
// one {"tracklet_id": ..., "truth": {...}} object per line. Null truth
// fields are omitted from the JSON. The reader also accepts header-less
// files of bare records.
void save_truths(const std::vector<TruthRecord>& records,
                 const std::string& path,
                 const nlohmann::json& extra = nlohmann::json::object());

std::vector<TruthRecord> load_truths(const std::string& path);

}  // namespace pitchstats::synth
