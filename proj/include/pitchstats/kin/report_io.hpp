#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pitchstats/kin/analyze.hpp"

namespace pitchstats::kin {

// One report as a JSON object. Every field key is always present; fields
// that could not be computed are explicit nulls, keeping the schema stable
// across records.
nlohmann::json report_to_json(const PitchReport& report);

PitchReport report_from_json(const nlohmann::json& obj);

// Report JSONL: a {"format": "pitch-report", "version": 1, ...extra}
// header line (extra carries the emitting tool's version and config echo)
// followed by one report object per line, in the given order.
void save_reports(const std::vector<PitchReport>& reports,
                  const std::string& path,
                  const nlohmann::json& extra = nlohmann::json::object());

std::vector<PitchReport> load_reports(const std::string& path);

}  // namespace pitchstats::kin
