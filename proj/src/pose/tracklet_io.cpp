#include "pitchstats/pose/tracklet_io.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pitchstats/error.hpp"

namespace pitchstats::pose {

namespace {

using nlohmann::json;

constexpr const char* kFormatName = "pose-tracklet";
constexpr int kFormatVersion = 1;

[[noreturn]] void fail_parse(long line, const std::string& message) {
  throw ParseError("line " + std::to_string(line) + ": " + message);
}

json parse_line(const std::string& text, long line) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) fail_parse(line, "malformed JSON");
  return doc;
}

void check_header(const json& doc, long line) {
  if (!doc.is_object() || doc.value("format", "") != kFormatName) {
    throw SchemaError("line " + std::to_string(line) +
                      ": missing pose-tracklet header");
  }
  if (!doc.contains("version") || !doc["version"].is_number_integer() ||
      doc["version"].get<int>() != kFormatVersion) {
    throw SchemaError("line " + std::to_string(line) +
                      ": unsupported pose-tracklet version");
  }
}

PoseSequence parse_record(const json& doc, long line) {
  if (!doc.is_object()) fail_parse(line, "record is not an object");
  for (const char* key : {"tracklet_id", "fps", "joint_names", "frames"}) {
    if (!doc.contains(key)) {
      throw SchemaError("line " + std::to_string(line) + ": missing key '" +
                        key + "'");
    }
  }
  if (!doc["tracklet_id"].is_string()) {
    throw SchemaError("line " + std::to_string(line) +
                      ": tracklet_id must be a string");
  }
  if (!doc["fps"].is_number()) {
    throw SchemaError("line " + std::to_string(line) + ": fps must be a number");
  }

  PoseSequence seq;
  seq.tracklet_id = doc["tracklet_id"].get<std::string>();
  seq.fps = doc["fps"].get<Scalar>();
  if (!std::isfinite(seq.fps) || seq.fps <= 0) {
    throw ValidationError("line " + std::to_string(line) +
                          ": fps must be finite and positive");
  }

  const json& names = doc["joint_names"];
  if (!names.is_array() || names.size() != kNumJoints) {
    throw SchemaError("line " + std::to_string(line) + ": joint_names must list " +
                      std::to_string(kNumJoints) + " joints");
  }
  // Map record order -> canonical order; duplicates leave a joint unnamed.
  std::array<int, kNumJoints> canonical;
  std::array<bool, kNumJoints> seen{};
  for (int k = 0; k < kNumJoints; ++k) {
    if (!names[static_cast<std::size_t>(k)].is_string()) {
      throw SchemaError("line " + std::to_string(line) +
                        ": joint_names entries must be strings");
    }
    const int idx = static_cast<int>(
        joint_from_name(names[static_cast<std::size_t>(k)].get<std::string>()));
    if (seen[static_cast<std::size_t>(idx)]) {
      throw SchemaError("line " + std::to_string(line) + ": duplicate joint name");
    }
    seen[static_cast<std::size_t>(idx)] = true;
    canonical[static_cast<std::size_t>(k)] = idx;
  }

  const json& frames = doc["frames"];
  if (!frames.is_array() || frames.empty()) {
    throw ValidationError("line " + std::to_string(line) +
                          ": frames must be a non-empty array");
  }
  const json* mask = nullptr;
  if (doc.contains("valid_mask") && !doc["valid_mask"].is_null()) {
    mask = &doc["valid_mask"];
    if (!mask->is_array() || mask->size() != frames.size()) {
      throw SchemaError("line " + std::to_string(line) +
                        ": valid_mask must have one row per frame");
    }
  }

  seq.frames.resize(frames.size());
  for (std::size_t n = 0; n < frames.size(); ++n) {
    const json& row = frames[n];
    if (!row.is_array() || row.size() != kNumJoints) {
      throw SchemaError("line " + std::to_string(line) + ": frame " +
                        std::to_string(n) + " must list " +
                        std::to_string(kNumJoints) + " joints");
    }
    PoseFrame& frame = seq.frames[n];
    for (int k = 0; k < kNumJoints; ++k) {
      const json& coords = row[static_cast<std::size_t>(k)];
      const int target = canonical[static_cast<std::size_t>(k)];
      const std::string& jname = joint_name(static_cast<JointId>(target));
      if (!coords.is_array() || coords.size() != kNumCoords) {
        throw SchemaError("line " + std::to_string(line) + ": frame " +
                          std::to_string(n) + " joint " + jname +
                          " must have 3 coordinates");
      }
      for (int c = 0; c < kNumCoords; ++c) {
        const json& value = coords[static_cast<std::size_t>(c)];
        if (!value.is_number() ||
            !std::isfinite(value.get<Scalar>())) {
          fail_parse(line, "frame " + std::to_string(n) + " joint " + jname +
                               " has a non-numeric or non-finite coordinate");
        }
        frame.joints(target, c) = value.get<Scalar>();
      }
    }
    if (mask) {
      const json& mrow = (*mask)[n];
      if (!mrow.is_array() || mrow.size() != kNumJoints) {
        throw SchemaError("line " + std::to_string(line) + ": valid_mask row " +
                          std::to_string(n) + " must list " +
                          std::to_string(kNumJoints) + " flags");
      }
      for (int k = 0; k < kNumJoints; ++k) {
        const json& flag = mrow[static_cast<std::size_t>(k)];
        if (!flag.is_boolean()) {
          throw SchemaError("line " + std::to_string(line) +
                            ": valid_mask entries must be booleans");
        }
        frame.valid_mask[static_cast<std::size_t>(
            canonical[static_cast<std::size_t>(k)])] = flag.get<bool>();
      }
    }
  }
  seq.validate();
  return seq;
}

// Shared scan over a tracklet file. Returns after the whole file is read;
// `handle` sees each record line's text and number.
template <typename Handler>
void scan_file(const std::string& path, Handler&& handle) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open tracklet file: " + path);
  std::string text;
  long line = 0;
  bool have_header = false;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    if (!have_header) {
      check_header(parse_line(text, line), line);
      have_header = true;
      continue;
    }
    handle(text, line);
  }
  if (in.bad()) throw IoError("read failure on tracklet file: " + path);
  if (!have_header) {
    throw SchemaError("tracklet file has no header line: " + path);
  }
}

}  // namespace

std::vector<PoseSequence> load_tracklets(const std::string& path) {
  std::vector<PoseSequence> sequences;
  scan_file(path, [&](const std::string& text, long line) {
    sequences.push_back(parse_record(parse_line(text, line), line));
  });
  return sequences;
}

void save_tracklets(const std::vector<PoseSequence>& sequences,
                    const std::string& path) {
  for (const PoseSequence& seq : sequences) seq.validate();
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open tracklet file for writing: " + path);

  json header;
  header["format"] = kFormatName;
  header["version"] = kFormatVersion;
  out << header.dump() << '\n';

  for (const PoseSequence& seq : sequences) {
    json rec;
    rec["tracklet_id"] = seq.tracklet_id;
    rec["fps"] = seq.fps;
    json names = json::array();
    for (const std::string& name : joint_names()) names.push_back(name);
    rec["joint_names"] = std::move(names);

    json frames = json::array();
    bool any_invalid = false;
    for (const PoseFrame& frame : seq.frames) {
      json row = json::array();
      for (int k = 0; k < kNumJoints; ++k) {
        row.push_back({frame.joints(k, 0), frame.joints(k, 1), frame.joints(k, 2)});
        any_invalid |= !frame.valid_mask[static_cast<std::size_t>(k)];
      }
      frames.push_back(std::move(row));
    }
    rec["frames"] = std::move(frames);

    if (any_invalid) {
      json mask = json::array();
      for (const PoseFrame& frame : seq.frames) {
        json row = json::array();
        for (int k = 0; k < kNumJoints; ++k) {
          row.push_back(frame.valid_mask[static_cast<std::size_t>(k)]);
        }
        mask.push_back(std::move(row));
      }
      rec["valid_mask"] = std::move(mask);
    }
    out << rec.dump() << '\n';
  }
  if (!out) throw IoError("write failure on tracklet file: " + path);
}

void for_each_tracklet(
    const std::string& path,
    const std::function<void(PoseSequence)>& on_record,
    const std::function<bool(long, const std::string&)>& on_error) {
  bool stopped = false;
  scan_file(path, [&](const std::string& text, long line) {
    if (stopped) return;
    try {
      on_record(parse_record(parse_line(text, line), line));
    } catch (const Error& e) {
      if (!on_error(line, e.what())) stopped = true;
    }
  });
}

}  // namespace pitchstats::pose
