#pragma once

#include <cstdint>
#include <vector>

#include "pitchstats/nn/loss.hpp"
#include "pitchstats/nn/optim.hpp"
#include "pitchstats/tcn/model.hpp"

namespace pitchstats::tcn {

// Integer labels beside their sequences. Role models use 0..3 in Role order;
// binary models use 0/1 (right/left, windup/stretch).
struct LabeledDataset {
  std::vector<pose::PoseSequence> sequences;
  std::vector<int> labels;

  Index size() const { return static_cast<Index>(sequences.size()); }
};

struct EpochStats {
  int epoch = 0;      // 1-based
  Scalar loss = 0;    // sample-weighted mean focal loss
  Scalar accuracy = 0;  // training-pass accuracy
};

// One training configuration plus its per-epoch history (filled by train).
struct TrainRun {
  int epochs = 200;
  int batch_size = 48;
  nn::OptimConfig optimizer;
  nn::FocalLossParams loss;  // empty alpha -> balanced from label frequencies
  std::uint64_t seed = 0;    // shuffling and dropout stream

  // Optional plateau stop: after `early_stop_patience` consecutive epochs
  // with accuracy 1.0 and loss below `early_stop_loss`, remaining epochs are
  // skipped. 0 disables. `epochs` stays the hard cap either way.
  int early_stop_patience = 0;
  Scalar early_stop_loss = 1e-2;

  std::vector<EpochStats> history;
};

// Minibatch training with the focal objective and the configured optimizer.
// Shuffling, dropout, and parameter updates are all driven by run.seed, so a
// fixed seed reproduces the trajectory bit-for-bit at thread count 1.
// Aborts with a diagnostic (epoch, batch, max |grad|) if the loss leaves the
// finite range.
void train(TcnModel& model, const LabeledDataset& data, TrainRun& run);

}  // namespace pitchstats::tcn
