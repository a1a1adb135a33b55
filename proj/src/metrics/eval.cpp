#include "pitchstats/metrics/eval.hpp"

#include <cmath>
#include <optional>
#include <unordered_map>

#include "pitchstats/error.hpp"

namespace pitchstats::metrics {

namespace {

// Accumulates one scalar field under a MetricSpec. Truth values of zero are
// skipped for percent margins (relative error undefined); null predictions
// count against every threshold.
struct FieldScorer {
  MetricResult result;
  std::vector<Index> hits;

  FieldScorer(std::string field, const MetricSpec& spec) {
    result.field = std::move(field);
    result.spec = spec;
    hits.assign(spec.thresholds.size(), 0);
  }

  void add(Scalar truth, const std::optional<Scalar>& pred) {
    const bool percent = result.spec.kind == MetricSpec::Kind::percent_margin;
    if (percent && truth == 0.0) return;
    ++result.n_scored;
    if (!pred) return;
    const Scalar err = percent ? std::abs(*pred - truth) / std::abs(truth)
                               : std::abs(*pred - truth);
    for (std::size_t i = 0; i < hits.size(); ++i) {
      const Scalar margin = percent ? result.spec.thresholds[i] / 100.0
                                    : result.spec.thresholds[i];
      if (err <= margin) ++hits[i];
    }
  }

  MetricResult finish() {
    result.accuracies.assign(hits.size(), 0.0);
    if (result.n_scored > 0) {
      for (std::size_t i = 0; i < hits.size(); ++i) {
        result.accuracies[i] = static_cast<Scalar>(hits[i]) /
                               static_cast<Scalar>(result.n_scored);
      }
    }
    return std::move(result);
  }
};

template <typename Label>
void tally(ConfusionMatrix& matrix, const std::optional<Label>& truth,
           const std::optional<Label>& pred) {
  if (!truth) return;
  if (!pred) {
    ++matrix.n_missing;
    return;
  }
  ++matrix.counts[static_cast<std::size_t>(*truth)]
                 [static_cast<std::size_t>(*pred)];
}

}  // namespace

void MetricSpec::validate() const {
  if (thresholds.empty()) {
    throw ValidationError("metric spec needs at least one threshold");
  }
  Scalar prev = 0.0;
  for (Scalar t : thresholds) {
    if (!std::isfinite(t) || t <= prev) {
      throw ValidationError(
          "metric thresholds must be positive, finite, and strictly "
          "increasing");
    }
    prev = t;
  }
}

bool MetricResult::monotone() const {
  for (std::size_t i = 1; i < accuracies.size(); ++i) {
    if (accuracies[i] < accuracies[i - 1]) return false;
  }
  return true;
}

Index ConfusionMatrix::total() const {
  return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
}

Scalar ConfusionMatrix::accuracy() const {
  const Index n = total();
  if (n == 0) return 0.0;
  return static_cast<Scalar>(counts[0][0] + counts[1][1]) /
         static_cast<Scalar>(n);
}

bool EvalReport::monotone() const {
  for (const MetricResult& m : metrics) {
    if (!m.monotone()) return false;
  }
  return true;
}

EvalReport evaluate(const std::vector<kin::PitchReport>& reports,
                    const std::vector<synth::TruthRecord>& truths,
                    const EvalConfig& config) {
  config.release_margins.validate();
  config.velocity_margins.validate();
  config.extension_margins.validate();

  std::unordered_map<std::string, const synth::TruthRecord*> by_id;
  by_id.reserve(truths.size());
  for (const synth::TruthRecord& t : truths) {
    if (!by_id.emplace(t.tracklet_id, &t).second) {
      throw ValidationError("duplicate tracklet_id in truths: " +
                            t.tracklet_id);
    }
  }

  EvalReport report;
  FieldScorer release("release_frame", config.release_margins);
  FieldScorer velocity("pitch_velocity_mps", config.velocity_margins);
  FieldScorer extension("release_extension_m", config.extension_margins);

  std::unordered_map<std::string, bool> matched;
  matched.reserve(reports.size());
  for (const kin::PitchReport& r : reports) {
    if (!matched.emplace(r.tracklet_id, true).second) {
      throw ValidationError("duplicate tracklet_id in reports: " +
                            r.tracklet_id);
    }
    const auto it = by_id.find(r.tracklet_id);
    if (it == by_id.end()) {
      report.unmatched_report_ids.push_back(r.tracklet_id);
      continue;
    }
    const synth::TruthRecord& truth = *it->second;
    ++report.n_matched;

    if (truth.release_frame) {
      std::optional<Scalar> pred;
      if (r.release_frame) pred = static_cast<Scalar>(*r.release_frame);
      release.add(static_cast<Scalar>(*truth.release_frame), pred);
    }
    if (truth.release_speed_mps) {
      velocity.add(*truth.release_speed_mps, r.pitch_velocity_mps);
    }
    if (truth.extension_m) {
      extension.add(*truth.extension_m, r.release_extension_m);
    }
    tally(report.handedness, truth.handedness, r.handedness);
    tally(report.position, truth.position_style, r.pitch_position);
  }

  for (const synth::TruthRecord& t : truths) {
    if (!matched.count(t.tracklet_id)) {
      report.unmatched_truth_ids.push_back(t.tracklet_id);
    }
  }

  report.metrics.push_back(release.finish());
  report.metrics.push_back(velocity.finish());
  report.metrics.push_back(extension.finish());
  return report;
}

}  // namespace pitchstats::metrics
