#include "pitchstats/synth/truth_io.hpp"

#include <fstream>
#include <string>

#include <json.hpp>

#include "pitchstats/error.hpp"

namespace pitchstats::synth {

namespace {

using nlohmann::json;

json truth_to_json(const TruthRecord& rec) {
  json truth;
  truth["role"] = pose::role_name(rec.role);
  if (rec.handedness) truth["handedness"] = pose::handedness_name(*rec.handedness);
  if (rec.position_style) {
    truth["position"] = pose::pitch_position_name(*rec.position_style);
  }
  if (rec.release_frame) truth["release_frame"] = *rec.release_frame;
  if (rec.release_speed_mps) truth["release_speed_mps"] = *rec.release_speed_mps;
  if (rec.extension_m) truth["extension_m"] = *rec.extension_m;
  if (rec.release_point) {
    truth["release_point"] = {rec.release_point->x(), rec.release_point->y(),
                              rec.release_point->z()};
  }
  return json{{"tracklet_id", rec.tracklet_id}, {"truth", truth}};
}

TruthRecord truth_from_json(const json& obj, std::size_t line_no) {
  const std::string where = "line " + std::to_string(line_no) + ": ";
  if (!obj.is_object() || !obj.contains("tracklet_id") ||
      !obj.contains("truth") || !obj["truth"].is_object()) {
    throw SchemaError(where + "expected {\"tracklet_id\", \"truth\"} object");
  }
  const json& truth = obj["truth"];
  if (!truth.contains("role")) {
    throw SchemaError(where + "truth record lacks a role");
  }
  TruthRecord rec;
  try {
    rec.tracklet_id = obj["tracklet_id"].get<std::string>();
    rec.role = pose::role_from_name(truth["role"].get<std::string>());
    if (truth.contains("handedness")) {
      rec.handedness =
          pose::handedness_from_name(truth["handedness"].get<std::string>());
    }
    if (truth.contains("position")) {
      rec.position_style = pose::pitch_position_from_name(
          truth["position"].get<std::string>());
    }
    if (truth.contains("release_frame")) {
      rec.release_frame = truth["release_frame"].get<Index>();
    }
    if (truth.contains("release_speed_mps")) {
      rec.release_speed_mps = truth["release_speed_mps"].get<Scalar>();
    }
    if (truth.contains("extension_m")) {
      rec.extension_m = truth["extension_m"].get<Scalar>();
    }
    if (truth.contains("release_point")) {
      const json& p = truth["release_point"];
      if (!p.is_array() || p.size() != 3) {
        throw SchemaError(where + "release_point must be a 3-element array");
      }
      rec.release_point =
          Vector3(p[0].get<Scalar>(), p[1].get<Scalar>(), p[2].get<Scalar>());
    }
  } catch (const json::exception& e) {
    throw SchemaError(where + e.what());
  }
  return rec;
}

}  // namespace

TruthRecord to_truth_record(const std::string& tracklet_id,
                            const PitchTruth& truth) {
  TruthRecord rec;
  rec.tracklet_id = tracklet_id;
  rec.role = truth.role;
  rec.handedness = truth.handedness;
  rec.position_style = truth.position_style;
  rec.release_frame = truth.release_frame;
  rec.release_speed_mps = truth.release_speed_mps;
  rec.extension_m = truth.extension_m;
  rec.release_point = truth.release_point;
  return rec;
}

void save_truths(const std::vector<TruthRecord>& records,
                 const std::string& path, const json& extra) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  json header = extra;
  header["format"] = "pitch-truth";
  header["version"] = 1;
  out << header.dump() << '\n';
  for (const TruthRecord& rec : records) {
    out << truth_to_json(rec).dump() << '\n';
  }
  if (!out) throw IoError("failed while writing " + path);
}

std::vector<TruthRecord> load_truths(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<TruthRecord> records;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded()) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": malformed JSON in " + path);
    }
    if (first && obj.is_object() && obj.contains("format")) {
      first = false;
      if (obj["format"] != "pitch-truth" || obj.value("version", 0) != 1) {
        throw SchemaError(path + " has an unrecognized truth-file header");
      }
      continue;
    }
    first = false;
    records.push_back(truth_from_json(obj, line_no));
  }
  if (in.bad()) throw IoError("failed while reading " + path);
  return records;
}

}  // namespace pitchstats::synth
