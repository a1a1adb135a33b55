#include "pitchstats/kin/report_io.hpp"

#include <fstream>

#include "pitchstats/error.hpp"
#include "pitchstats/pose/joints.hpp"

namespace pitchstats::kin {

namespace {

using nlohmann::json;

constexpr const char* kFormatName = "pitch-report";
constexpr int kFormatVersion = 1;

template <typename T>
json opt_json(const std::optional<T>& v) {
  if (!v) return nullptr;
  return *v;
}

}  // namespace

json report_to_json(const PitchReport& r) {
  json obj;
  obj["tracklet_id"] = r.tracklet_id;
  obj["handedness"] =
      r.handedness ? json(pose::handedness_name(*r.handedness)) : json();
  obj["pitch_position"] =
      r.pitch_position ? json(pose::pitch_position_name(*r.pitch_position))
                       : json();
  obj["release_frame"] = opt_json(r.release_frame);
  obj["frame_a"] = opt_json(r.frame_a);
  obj["frame_b"] = opt_json(r.frame_b);
  obj["release_point_3d"] =
      r.release_point_3d
          ? json::array({r.release_point_3d->x(), r.release_point_3d->y(),
                         r.release_point_3d->z()})
          : json();
  obj["pitch_velocity_mps"] = opt_json(r.pitch_velocity_mps);
  obj["pitch_velocity_mph"] = opt_json(r.pitch_velocity_mph);
  obj["release_extension_m"] = opt_json(r.release_extension_m);
  obj["wrist_speed3d_mps"] = opt_json(r.wrist_speed3d_mps);
  obj["confidences"] = json::object();
  for (const auto& [field, value] : r.confidences) {
    obj["confidences"][field] = value;
  }
  obj["field_errors"] = json::array();
  for (const FieldError& e : r.field_errors) {
    obj["field_errors"].push_back({{"field", e.field}, {"reason", e.reason}});
  }
  obj["warnings"] = r.warnings;
  return obj;
}

PitchReport report_from_json(const json& obj) {
  PitchReport r;
  try {
    r.tracklet_id = obj.at("tracklet_id").get<std::string>();
    if (!obj.at("handedness").is_null()) {
      r.handedness =
          pose::handedness_from_name(obj["handedness"].get<std::string>());
    }
    if (!obj.at("pitch_position").is_null()) {
      r.pitch_position = pose::pitch_position_from_name(
          obj["pitch_position"].get<std::string>());
    }
    if (!obj.at("release_frame").is_null()) {
      r.release_frame = obj["release_frame"].get<Index>();
    }
    if (!obj.at("frame_a").is_null()) r.frame_a = obj["frame_a"].get<Index>();
    if (!obj.at("frame_b").is_null()) r.frame_b = obj["frame_b"].get<Index>();
    if (!obj.at("release_point_3d").is_null()) {
      const json& p = obj["release_point_3d"];
      if (!p.is_array() || p.size() != 3) {
        throw SchemaError("release_point_3d must be a 3-element array");
      }
      r.release_point_3d =
          Vector3(p[0].get<Scalar>(), p[1].get<Scalar>(), p[2].get<Scalar>());
    }
    if (!obj.at("pitch_velocity_mps").is_null()) {
      r.pitch_velocity_mps = obj["pitch_velocity_mps"].get<Scalar>();
    }
    if (!obj.at("pitch_velocity_mph").is_null()) {
      r.pitch_velocity_mph = obj["pitch_velocity_mph"].get<Scalar>();
    }
    if (!obj.at("release_extension_m").is_null()) {
      r.release_extension_m = obj["release_extension_m"].get<Scalar>();
    }
    if (!obj.at("wrist_speed3d_mps").is_null()) {
      r.wrist_speed3d_mps = obj["wrist_speed3d_mps"].get<Scalar>();
    }
    for (const auto& [field, value] : obj.at("confidences").items()) {
      r.confidences[field] = value.get<Scalar>();
    }
    for (const json& e : obj.at("field_errors")) {
      r.field_errors.push_back({e.at("field").get<std::string>(),
                                e.at("reason").get<std::string>()});
    }
    for (const json& w : obj.at("warnings")) {
      r.warnings.push_back(w.get<std::string>());
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad pitch report: ") + e.what());
  }
  return r;
}

void save_reports(const std::vector<PitchReport>& reports,
                  const std::string& path, const json& extra) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  json header = extra;
  header["format"] = kFormatName;
  header["version"] = kFormatVersion;
  out << header.dump() << '\n';
  for (const PitchReport& r : reports) {
    out << report_to_json(r).dump() << '\n';
  }
  if (!out) throw IoError("failed while writing " + path);
}

std::vector<PitchReport> load_reports(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<PitchReport> reports;
  std::string line;
  std::size_t line_no = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded()) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": malformed JSON in " + path);
    }
    if (!seen_header) {
      if (!obj.is_object() || obj.value("format", "") != kFormatName) {
        throw SchemaError(path + " lacks a pitch-report header line");
      }
      if (obj.value("version", 0) != kFormatVersion) {
        throw SchemaError("unsupported pitch-report version in " + path);
      }
      seen_header = true;
      continue;
    }
    reports.push_back(report_from_json(obj));
  }
  if (in.bad()) throw IoError("failed while reading " + path);
  if (!seen_header) throw SchemaError(path + " is empty: no header line");
  return reports;
}

}  // namespace pitchstats::kin
