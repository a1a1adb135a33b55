#pragma once

#include <array>
#include <string>
#include <vector>

#include "pitchstats/kin/analyze.hpp"
#include "pitchstats/synth/truth_io.hpp"
#include "pitchstats/types.hpp"

namespace pitchstats::metrics {

// One accuracy family: A_x counts a sample correct when the prediction is
// within x frames of truth (inclusive); A_x% when the relative error
// against the truth value is within x percent (inclusive).
struct MetricSpec {
  enum class Kind { frame_margin, percent_margin };
  Kind kind = Kind::frame_margin;
  std::vector<Scalar> thresholds;  // frames or percents, strictly increasing

  void validate() const;
};

// Accuracies for one report field under one MetricSpec, aligned with the
// spec's thresholds. n_scored is the denominator: matched samples whose
// truth carries the field (zero-valued truths are excluded from percent
// margins, where relative error is undefined). Null predictions stay in
// the denominator and count as misses.
struct MetricResult {
  std::string field;
  MetricSpec spec;
  std::vector<Scalar> accuracies;
  Index n_scored = 0;

  bool monotone() const;  // accuracies non-decreasing across thresholds
};

// 2x2 label tally, rows = truth, columns = prediction.
struct ConfusionMatrix {
  std::array<std::array<Index, 2>, 2> counts{{{0, 0}, {0, 0}}};
  Index n_missing = 0;  // truth labeled but prediction null

  Index total() const;
  Scalar accuracy() const;  // diagonal fraction; 0 when empty
};

struct EvalReport {
  Index n_matched = 0;
  std::vector<std::string> unmatched_report_ids;  // excluded from scoring
  std::vector<std::string> unmatched_truth_ids;
  std::vector<MetricResult> metrics;  // release, velocity, extension
  ConfusionMatrix handedness;
  ConfusionMatrix position;

  bool monotone() const;  // every metric family is monotone
};

struct EvalConfig {
  MetricSpec release_margins{MetricSpec::Kind::frame_margin, {1.0, 2.0, 5.0}};
  MetricSpec velocity_margins{MetricSpec::Kind::percent_margin,
                              {1.0, 2.0, 5.0}};
  MetricSpec extension_margins{MetricSpec::Kind::percent_margin,
                               {5.0, 8.0, 10.0}};
};

// Joins reports to truths on tracklet_id (unmatched ids on either side are
// listed and excluded) and scores release frame, velocity, and extension
// under the configured margins plus handedness/position confusion tallies.
EvalReport evaluate(const std::vector<kin::PitchReport>& reports,
                    const std::vector<synth::TruthRecord>& truths,
                    const EvalConfig& config = {});

}  // namespace pitchstats::metrics
