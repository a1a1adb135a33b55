// Command-line surface: synthetic data generation, TCN training and
// classification, pitch analysis, and margin-metric evaluation.
//
// Exit codes: 0 success, 2 usage error, 3 missing input artifact,
// 4 data/config error, 1 unexpected internal failure.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pitchstats/error.hpp"
#include "pitchstats/kin/analyze.hpp"
#include "pitchstats/kin/report_io.hpp"
#include "pitchstats/metrics/eval.hpp"
#include "pitchstats/nn/threading.hpp"
#include "pitchstats/pose/tracklet_io.hpp"
#include "pitchstats/rng.hpp"
#include "pitchstats/synth/synthgen.hpp"
#include "pitchstats/synth/truth_io.hpp"
#include "pitchstats/tcn/classify.hpp"
#include "pitchstats/tcn/model.hpp"
#include "pitchstats/tcn/model_io.hpp"
#include "pitchstats/tcn/train.hpp"
#include "pitchstats/version.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pitchstats;

// A named input file that does not exist on disk; mapped to exit code 3.
struct MissingArtifactError : Error {
  using Error::Error;
};

// Accepts both TOML (the CLI11 default) and JSON config files, sniffed by
// the first non-whitespace byte.
class FlexibleConfig : public CLI::ConfigTOML {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    char c = '\0';
    while (input.get(c) && std::isspace(static_cast<unsigned char>(c))) {
    }
    input.clear();
    input.seekg(0);
    if (c != '{') return CLI::ConfigTOML::from_config(input);

    json obj;
    try {
      obj = json::parse(input);
    } catch (const json::exception& e) {
      throw CLI::FileError(std::string("config JSON: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    std::vector<std::string> parents;
    flatten(obj, parents, items);
    return items;
  }

 private:
  static std::string scalar_text(const json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
    return value.dump();
  }

  static void flatten(const json& obj, std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : obj.items()) {
      if (value.is_object()) {
        parents.push_back(key);
        flatten(value, parents, items);
        parents.pop_back();
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const json& v : value) item.inputs.push_back(scalar_text(v));
      } else {
        item.inputs.push_back(scalar_text(value));
      }
      items.push_back(std::move(item));
    }
  }
};

json tool_info() {
  return json{{"name", "pitchstats"}, {"version", kVersionString}};
}

void require_input(const std::string& path, const std::string& what) {
  if (!fs::exists(path)) {
    throw MissingArtifactError("missing " + what + ": " + path);
  }
}

void emit(const json& doc, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot open " + out_path + " for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed while writing " + out_path);
}

struct GlobalOpts {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;
};

// ---------------------------------------------------------------- synth --

struct SynthOpts {
  long long pitches = 100;
  long long roles = 0;  // per-class count for the role dataset
  Scalar noise = 0.005;
};

int run_synth(const GlobalOpts& g, const SynthOpts& o) {
  const std::string dir = g.out.empty() ? "." : g.out;
  fs::create_directories(dir);
  const std::string tracklet_path = dir + "/tracklets.jsonl";
  const std::string truth_path = dir + "/truths.jsonl";

  std::vector<pose::PoseSequence> sequences;
  std::vector<synth::TruthRecord> truths;
  Rng root(g.seed);

  for (long long i = 0; i < o.pitches; ++i) {
    Rng rng = root.derive(static_cast<std::uint64_t>(i));
    synth::SynthPitchSpec spec = synth::random_pitch_spec(rng);
    spec.noise_sigma = o.noise;
    synth::SynthPitch pitch = synth::generate_pitch(spec);
    char id[32];
    std::snprintf(id, sizeof(id), "pitch-%04lld", i);
    pitch.sequence.tracklet_id = id;
    truths.push_back(synth::to_truth_record(id, pitch.truth));
    sequences.push_back(std::move(pitch.sequence));
  }

  if (o.roles > 0) {
    // Distinct stream so adding pitches never reshuffles the role samples.
    tcn::LabeledDataset roles = synth::generate_role_dataset(
        static_cast<Index>(o.roles), root.derive(0x726f6c6573ull).seed());
    for (std::size_t i = 0; i < roles.sequences.size(); ++i) {
      synth::TruthRecord rec;
      rec.tracklet_id = roles.sequences[i].tracklet_id;
      rec.role = static_cast<pose::Role>(roles.labels[i]);
      truths.push_back(std::move(rec));
      sequences.push_back(std::move(roles.sequences[i]));
    }
  }

  const json config{{"seed", g.seed},   {"pitches", o.pitches},
                    {"roles", o.roles}, {"noise", o.noise},
                    {"out", dir}};
  pose::save_tracklets(sequences, tracklet_path);
  synth::save_truths(truths, truth_path,
                     json{{"tool", tool_info()}, {"config", config}});

  const json manifest{{"tool", tool_info()},
                      {"config", config},
                      {"outputs",
                       {{"tracklets", tracklet_path}, {"truths", truth_path}}},
                      {"counts",
                       {{"tracklets", sequences.size()},
                        {"truths", truths.size()}}}};
  std::cout << manifest.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------- train --

struct TrainOpts {
  std::string task;  // role | handedness | position
  std::string tracklets;
  std::string truths;
  std::string history;
  std::string arch;  // full | compact; empty = per-task default
  int epochs = -1;   // -1 = per-task default
  int batch = 48;
  int patience = 3;
  int seq_len = 100;
  Scalar lr = 1e-2;
  Scalar weight_decay = 1e-4;
  Scalar dropout = 0.2;
  Scalar gamma = 2.0;
  std::string alpha = "balanced";  // balanced | uniform
  std::string optimizer = "adamw";
};

int task_default_epochs(const std::string& task) {
  if (task == "role") return 200;
  if (task == "handedness") return 50;
  return 100;  // position
}

// Extracts per-task labels from the truth sidecar. Sequences without a
// truth entry, or whose truth lacks the task's field, are skipped.
tcn::LabeledDataset build_dataset(const std::string& task,
                                  std::vector<pose::PoseSequence> sequences,
                                  const std::vector<synth::TruthRecord>& truths,
                                  long long* skipped) {
  std::unordered_map<std::string, const synth::TruthRecord*> by_id;
  for (const synth::TruthRecord& t : truths) by_id[t.tracklet_id] = &t;

  tcn::LabeledDataset data;
  for (pose::PoseSequence& seq : sequences) {
    const auto it = by_id.find(seq.tracklet_id);
    int label = -1;
    if (it != by_id.end()) {
      const synth::TruthRecord& t = *it->second;
      if (task == "role") {
        label = static_cast<int>(t.role);
      } else if (task == "handedness" && t.handedness) {
        label = static_cast<int>(*t.handedness);
      } else if (task == "position" && t.position_style) {
        label = static_cast<int>(*t.position_style);
      }
    }
    if (label < 0) {
      ++*skipped;
      continue;
    }
    data.labels.push_back(label);
    data.sequences.push_back(std::move(seq));
  }
  return data;
}

void write_history_csv(const std::string& path,
                       const std::vector<tcn::EpochStats>& history) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "epoch,loss,accuracy\n";
  char row[128];
  for (const tcn::EpochStats& e : history) {
    std::snprintf(row, sizeof(row), "%d,%.17g,%.17g\n", e.epoch, e.loss,
                  e.accuracy);
    out << row;
  }
  if (!out) throw IoError("failed while writing " + path);
}

int run_train(const GlobalOpts& g, const TrainOpts& o) {
  require_input(o.tracklets, "tracklet file");
  require_input(o.truths, "truth file");
  const std::string model_path = g.out.empty() ? "model.ptcn" : g.out;
  const std::string history_path =
      o.history.empty()
          ? fs::path(model_path).replace_extension(".history.csv").string()
          : o.history;

  long long skipped = 0;
  tcn::LabeledDataset data =
      build_dataset(o.task, pose::load_tracklets(o.tracklets),
                    synth::load_truths(o.truths), &skipped);
  if (skipped > 0) {
    std::cerr << "warning: " << skipped << " tracklet(s) lack a usable '"
              << o.task << "' truth label and were skipped\n";
  }
  if (data.size() == 0) {
    throw ValidationError("no labeled sequences for task '" + o.task + "'");
  }

  tcn::TcnConfig config;
  config.head = o.task == "role" ? tcn::Head::role4 : tcn::Head::binary;
  const std::string arch =
      o.arch.empty() ? (o.task == "role" ? "full" : "compact") : o.arch;
  if (arch == "compact") {
    config.block_channels = {16, 16, 24, 24, 32};
  } else if (arch != "full") {
    throw ValidationError("unknown arch '" + arch + "' (full, compact)");
  }
  config.seq_len = o.seq_len;
  config.dropout_rate = o.dropout;

  tcn::TcnModel model(config, g.seed);

  tcn::TrainRun run;
  run.epochs = o.epochs < 0 ? task_default_epochs(o.task) : o.epochs;
  run.batch_size = o.batch;
  run.seed = g.seed;
  run.early_stop_patience = o.patience;
  run.optimizer.algo =
      o.optimizer == "adam" ? nn::OptimAlgo::adam : nn::OptimAlgo::adamw;
  run.optimizer.lr = o.lr;
  run.optimizer.weight_decay = o.weight_decay;
  run.loss.gamma = o.gamma;
  if (o.alpha == "uniform") {
    run.loss.alpha = nn::uniform_alpha(config.n_classes());
  } else if (o.alpha != "balanced") {
    throw ValidationError("unknown alpha mode '" + o.alpha +
                          "' (balanced, uniform)");
  }

  tcn::train(model, data, run);
  tcn::save_model(model, model_path);
  write_history_csv(history_path, run.history);

  json summary{{"tool", tool_info()},
               {"config",
                {{"task", o.task},
                 {"tracklets", o.tracklets},
                 {"truths", o.truths},
                 {"arch", arch},
                 {"epochs", run.epochs},
                 {"batch", o.batch},
                 {"patience", o.patience},
                 {"seq_len", o.seq_len},
                 {"lr", o.lr},
                 {"weight_decay", o.weight_decay},
                 {"dropout", o.dropout},
                 {"gamma", o.gamma},
                 {"alpha", o.alpha},
                 {"optimizer", o.optimizer},
                 {"seed", g.seed},
                 {"threads", g.threads}}},
               {"samples", data.size()},
               {"epochs_run", run.history.size()},
               {"outputs", {{"model", model_path}, {"history", history_path}}}};
  if (!run.history.empty()) {
    summary["final"] = {{"loss", run.history.back().loss},
                        {"accuracy", run.history.back().accuracy}};
  }
  std::cout << summary.dump(2) << '\n';
  return 0;
}

// ------------------------------------------------------------- classify --

struct ClassifyOpts {
  std::string task;
  std::string model;
  std::string tracklets;
};

int run_classify(const GlobalOpts& g, const ClassifyOpts& o) {
  require_input(o.model, "model file");
  require_input(o.tracklets, "tracklet file");
  const tcn::TcnModel model = tcn::load_model(o.model);
  std::vector<pose::PoseSequence> sequences = pose::load_tracklets(o.tracklets);
  std::sort(sequences.begin(), sequences.end(),
            [](const pose::PoseSequence& a, const pose::PoseSequence& b) {
              return a.tracklet_id < b.tracklet_id;
            });

  std::vector<json> lines;
  lines.reserve(sequences.size());
  for (const pose::PoseSequence& seq : sequences) {
    json line{{"tracklet_id", seq.tracklet_id}};
    if (o.task == "role") {
      const tcn::RoleResult r = tcn::classify_role(model, seq);
      line["role"] = pose::role_name(r.role);
      json dist;
      for (int c = 0; c < pose::kNumRoles; ++c) {
        dist[pose::role_name(static_cast<pose::Role>(c))] = r.distribution[c];
      }
      line["distribution"] = dist;
    } else if (o.task == "handedness") {
      const tcn::HandednessResult r = tcn::classify_handedness(model, seq);
      line["handedness"] = pose::handedness_name(r.handedness);
      line["confidence"] = r.confidence;
    } else {
      const tcn::PitchPositionResult r = tcn::classify_pitch_position(model, seq);
      line["position"] = pose::pitch_position_name(r.position);
      line["confidence"] = r.confidence;
    }
    lines.push_back(std::move(line));
  }

  const json header{{"format", "classification"},
                    {"version", 1},
                    {"tool", tool_info()},
                    {"config",
                     {{"task", o.task},
                      {"model", o.model},
                      {"tracklets", o.tracklets}}}};
  std::ostringstream body;
  body << header.dump() << '\n';
  for (const json& line : lines) body << line.dump() << '\n';
  if (g.out.empty()) {
    std::cout << body.str();
  } else {
    std::ofstream out(g.out, std::ios::binary);
    if (!out) throw IoError("cannot open " + g.out + " for writing");
    out << body.str();
    if (!out) throw IoError("failed while writing " + g.out);
  }
  return 0;
}

// -------------------------------------------------------------- analyze --

struct AnalyzeOpts {
  std::string tracklets;
  std::string handedness_model;
  std::string position_model;
  int window = kin::kDefaultWindow;
};

int run_analyze(const GlobalOpts& g, const AnalyzeOpts& o) {
  require_input(o.tracklets, "tracklet file");
  require_input(o.handedness_model, "handedness model file");
  require_input(o.position_model, "position model file");
  const std::string out_path = g.out.empty() ? "reports.jsonl" : g.out;

  const tcn::TcnModel handedness = tcn::load_model(o.handedness_model);
  const tcn::TcnModel position = tcn::load_model(o.position_model);
  kin::AnalyzeConfig config;
  config.window_n = o.window;

  std::vector<kin::PitchReport> reports;
  long long bad_records = 0;
  long long failed = 0;
  pose::for_each_tracklet(
      o.tracklets,
      [&](pose::PoseSequence seq) {
        try {
          reports.push_back(
              kin::analyze_pitch(seq, handedness, position, config));
        } catch (const Error& e) {
          ++failed;
          std::cerr << "warning: tracklet '" << seq.tracklet_id
                    << "' failed analysis: " << e.what() << '\n';
        }
      },
      [&](long line, const std::string& message) {
        ++bad_records;
        std::cerr << "warning: skipping line " << line << ": " << message
                  << '\n';
        return true;
      });

  const long long seen = static_cast<long long>(reports.size()) + failed;
  if (seen > 0 && reports.empty()) {
    throw ValidationError("all " + std::to_string(seen) +
                          " tracklet(s) failed analysis");
  }

  std::sort(reports.begin(), reports.end(),
            [](const kin::PitchReport& a, const kin::PitchReport& b) {
              return a.tracklet_id < b.tracklet_id;
            });

  const json config_echo{{"tracklets", o.tracklets},
                         {"handedness_model", o.handedness_model},
                         {"position_model", o.position_model},
                         {"window", o.window},
                         {"threads", g.threads}};
  kin::save_reports(reports, out_path,
                    json{{"tool", tool_info()}, {"config", config_echo}});

  const json manifest{{"tool", tool_info()},
                      {"config", config_echo},
                      {"counts",
                       {{"analyzed", reports.size()},
                        {"failed", failed},
                        {"skipped_records", bad_records}}},
                      {"output", out_path}};
  std::cout << manifest.dump(2) << '\n';
  return 0;
}

// ----------------------------------------------------------------- eval --

struct EvalOpts {
  std::string reports;
  std::string truths;
  std::vector<Scalar> release_margins{1.0, 2.0, 5.0};
  std::vector<Scalar> velocity_margins{1.0, 2.0, 5.0};
  std::vector<Scalar> extension_margins{5.0, 8.0, 10.0};
};

json metric_to_json(const metrics::MetricResult& m) {
  return json{{"field", m.field},
              {"kind", m.spec.kind == metrics::MetricSpec::Kind::frame_margin
                           ? "frame_margin"
                           : "percent_margin"},
              {"thresholds", m.spec.thresholds},
              {"accuracies", m.accuracies},
              {"n_scored", m.n_scored}};
}

json confusion_to_json(const metrics::ConfusionMatrix& c,
                       const char* label0, const char* label1) {
  return json{{"labels", {label0, label1}},
              {"counts",
               {{c.counts[0][0], c.counts[0][1]},
                {c.counts[1][0], c.counts[1][1]}}},
              {"missing", c.n_missing},
              {"accuracy", c.accuracy()}};
}

int run_eval(const GlobalOpts& g, const EvalOpts& o) {
  require_input(o.reports, "report file");
  require_input(o.truths, "truth file");

  metrics::EvalConfig config;
  config.release_margins.thresholds = o.release_margins;
  config.velocity_margins.thresholds = o.velocity_margins;
  config.extension_margins.thresholds = o.extension_margins;

  const metrics::EvalReport report = metrics::evaluate(
      kin::load_reports(o.reports), synth::load_truths(o.truths), config);

  for (const std::string& id : report.unmatched_report_ids) {
    std::cerr << "warning: report '" << id << "' has no matching truth\n";
  }
  for (const std::string& id : report.unmatched_truth_ids) {
    std::cerr << "warning: truth '" << id << "' has no matching report\n";
  }

  json doc{{"tool", tool_info()},
           {"config",
            {{"reports", o.reports},
             {"truths", o.truths},
             {"release_margins", o.release_margins},
             {"velocity_margins", o.velocity_margins},
             {"extension_margins", o.extension_margins}}},
           {"n_matched", report.n_matched},
           {"unmatched_report_ids", report.unmatched_report_ids},
           {"unmatched_truth_ids", report.unmatched_truth_ids},
           {"metrics", json::array()},
           {"handedness_confusion",
            confusion_to_json(report.handedness, "right", "left")},
           {"position_confusion",
            confusion_to_json(report.position, "windup", "stretch")},
           {"monotone", report.monotone()}};
  for (const metrics::MetricResult& m : report.metrics) {
    doc["metrics"].push_back(metric_to_json(m));
  }
  emit(doc, g.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pitch statistics from 3-d pose tracklets"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersionString);
  app.config_formatter(std::make_shared<FlexibleConfig>());
  app.set_config("--config", "", "TOML or JSON config file");

  GlobalOpts g;
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads for batch kernels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--out", g.out,
                 "output path (synth: directory; train: model file; "
                 "analyze: report file; classify/eval: file, default stdout)");

  SynthOpts synth_opts;
  CLI::App* synth = app.add_subcommand(
      "synth", "generate synthetic tracklets with ground truth");
  synth->fallthrough();
  synth->add_option("--pitches", synth_opts.pitches, "number of pitches")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  synth->add_option("--roles", synth_opts.roles,
                    "per-class count for a four-role classification set")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  synth->add_option("--noise", synth_opts.noise,
                    "Gaussian joint noise sigma, meters")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  TrainOpts train_opts;
  CLI::App* train = app.add_subcommand("train", "train a TCN classifier");
  train->fallthrough();
  train->add_option("--task", train_opts.task, "classification task")
      ->required()
      ->check(CLI::IsMember({"role", "handedness", "position"}));
  train->add_option("--tracklets", train_opts.tracklets, "tracklet JSONL")
      ->required();
  train->add_option("--truths", train_opts.truths, "truth sidecar JSONL")
      ->required();
  train->add_option("--history", train_opts.history,
                    "history CSV path (default: derived from model path)");
  train->add_option("--arch", train_opts.arch,
                    "block widths: full (64..256) or compact (16..32); "
                    "default full for role, compact for binary tasks")
      ->check(CLI::IsMember({"full", "compact"}));
  train->add_option("--epochs", train_opts.epochs,
                    "epoch cap (default 200 role / 50 handedness / "
                    "100 position)");
  train->add_option("--batch", train_opts.batch, "minibatch size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--patience", train_opts.patience,
                    "early-stop patience in plateau epochs, 0 disables")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  train->add_option("--seq-len", train_opts.seq_len, "model sequence length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--lr", train_opts.lr, "learning rate")
      ->capture_default_str();
  train->add_option("--weight-decay", train_opts.weight_decay, "weight decay")
      ->capture_default_str();
  train->add_option("--dropout", train_opts.dropout, "dropout rate")
      ->capture_default_str();
  train->add_option("--gamma", train_opts.gamma,
                    "focal exponent; 0 = cross-entropy")
      ->capture_default_str();
  train->add_option("--alpha", train_opts.alpha, "class weights")
      ->check(CLI::IsMember({"balanced", "uniform"}))
      ->capture_default_str();
  train->add_option("--optimizer", train_opts.optimizer, "optimizer")
      ->check(CLI::IsMember({"adamw", "adam"}))
      ->capture_default_str();

  ClassifyOpts classify_opts;
  CLI::App* classify =
      app.add_subcommand("classify", "run a trained classifier");
  classify->fallthrough();
  classify->add_option("--task", classify_opts.task, "classification task")
      ->required()
      ->check(CLI::IsMember({"role", "handedness", "position"}));
  classify->add_option("--model", classify_opts.model, "model file")
      ->required();
  classify->add_option("--tracklets", classify_opts.tracklets,
                       "tracklet JSONL")
      ->required();

  AnalyzeOpts analyze_opts;
  CLI::App* analyze =
      app.add_subcommand("analyze", "compute pitch reports per tracklet");
  analyze->fallthrough();
  analyze->add_option("--tracklets", analyze_opts.tracklets, "tracklet JSONL")
      ->required();
  analyze->add_option("--handedness-model", analyze_opts.handedness_model,
                      "binary handedness model")
      ->required();
  analyze->add_option("--position-model", analyze_opts.position_model,
                      "binary pitch-position model")
      ->required();
  analyze->add_option("--window", analyze_opts.window,
                      "release search half-width around Point B")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  EvalOpts eval_opts;
  CLI::App* eval =
      app.add_subcommand("eval", "score reports against ground truth");
  eval->fallthrough();
  eval->add_option("--reports", eval_opts.reports, "report JSONL")->required();
  eval->add_option("--truths", eval_opts.truths, "truth sidecar JSONL")
      ->required();
  eval->add_option("--release-margins", eval_opts.release_margins,
                   "frame margins")
      ->delimiter(',')
      ->capture_default_str();
  eval->add_option("--velocity-margins", eval_opts.velocity_margins,
                   "percent margins")
      ->delimiter(',')
      ->capture_default_str();
  eval->add_option("--extension-margins", eval_opts.extension_margins,
                   "percent margins")
      ->delimiter(',')
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    nn::set_num_threads(g.threads);
    if (synth->parsed()) return run_synth(g, synth_opts);
    if (train->parsed()) return run_train(g, train_opts);
    if (classify->parsed()) return run_classify(g, classify_opts);
    if (analyze->parsed()) return run_analyze(g, analyze_opts);
    if (eval->parsed()) return run_eval(g, eval_opts);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const MissingArtifactError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
