#include "pitchstats/tcn/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pitchstats/error.hpp"

namespace pitchstats::tcn {

namespace {

int predicted_class(const nn::Tensor& probs, Index row, Head head) {
  if (head == Head::binary) {
    return probs.at(row, 0) > Scalar(0.5) ? 1 : 0;
  }
  int best = 0;
  Scalar peak = probs.at(row, 0);
  for (Index c = 1; c < probs.dim(1); ++c) {
    if (probs.at(row, c) > peak) {
      peak = probs.at(row, c);
      best = static_cast<int>(c);
    }
  }
  return best;
}

}  // namespace

void train(TcnModel& model, const LabeledDataset& data, TrainRun& run) {
  run.history.clear();
  if (data.size() == 0) throw ValidationError("training dataset is empty");
  if (data.labels.size() != data.sequences.size()) {
    throw ValidationError("one label per sequence required");
  }
  const int n_classes = model.config().n_classes();
  for (int y : data.labels) {
    if (y < 0 || y >= n_classes) {
      throw ValidationError("label " + std::to_string(y) +
                            " outside the model's " +
                            std::to_string(n_classes) + " classes");
    }
  }
  if (run.epochs < 0) throw ValidationError("epochs must be >= 0");
  if (run.batch_size < 1) throw ValidationError("batch size must be >= 1");

  nn::FocalLossParams loss_params = run.loss;
  if (loss_params.alpha.empty()) {
    loss_params.alpha = nn::balanced_alpha(data.labels, n_classes);
  }
  loss_params.validate(n_classes);

  nn::OptimState optim(run.optimizer);
  const std::vector<nn::Tensor*> params = model.parameters();
  optim.init(params);

  Rng rng(run.seed);
  std::vector<Index> order(static_cast<std::size_t>(data.size()));
  std::iota(order.begin(), order.end(), Index{0});

  const Index total = data.size();
  int plateau = 0;
  for (int epoch = 1; epoch <= run.epochs; ++epoch) {
    rng.shuffle(order);
    Scalar loss_sum = 0;
    Index correct = 0;
    for (Index start = 0; start < total; start += run.batch_size) {
      const Index count = std::min<Index>(run.batch_size, total - start);
      std::vector<pose::PoseSequence> chunk;
      std::vector<int> targets;
      chunk.reserve(static_cast<std::size_t>(count));
      targets.reserve(static_cast<std::size_t>(count));
      for (Index i = 0; i < count; ++i) {
        const Index pick = order[static_cast<std::size_t>(start + i)];
        chunk.push_back(data.sequences[static_cast<std::size_t>(pick)]);
        targets.push_back(data.labels[static_cast<std::size_t>(pick)]);
      }
      const nn::Tensor input = to_input_tensor(
          pose::make_batch(chunk, model.config().seq_len));

      nn::Tape tape;
      TcnForward fwd = tcn_forward(tape, model, input, /*training=*/true, rng);
      nn::NodeId probs = fwd.output;
      if (model.config().head == Head::binary) {
        probs = nn::binary_pair(tape, probs);
      }
      const nn::NodeId loss_node = nn::focal_loss(tape, probs, targets, loss_params);
      const Scalar batch_loss = tape.value(loss_node)[0];
      tape.backward(loss_node);

      std::vector<const nn::Tensor*> grads;
      grads.reserve(fwd.param_nodes.size());
      for (nn::NodeId id : fwd.param_nodes) grads.push_back(&tape.grad(id));

      if (!std::isfinite(batch_loss)) {
        Scalar peak = 0;
        for (const nn::Tensor* g : grads) {
          peak = std::max(peak, g->array().abs().maxCoeff());
        }
        throw NumericError(
            "non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
            std::to_string(start / run.batch_size) + ", max |grad| " +
            std::to_string(peak));
      }
      nn::optim_step(optim, params, grads);

      loss_sum += batch_loss * static_cast<Scalar>(count);
      const nn::Tensor& head_probs = tape.value(fwd.output);
      for (Index i = 0; i < count; ++i) {
        if (predicted_class(head_probs, i, model.config().head) ==
            targets[static_cast<std::size_t>(i)]) {
          ++correct;
        }
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = loss_sum / static_cast<Scalar>(total);
    stats.accuracy = static_cast<Scalar>(correct) / static_cast<Scalar>(total);
    run.history.push_back(stats);

    if (run.early_stop_patience > 0) {
      if (stats.accuracy == Scalar(1) && stats.loss < run.early_stop_loss) {
        if (++plateau >= run.early_stop_patience) break;
      } else {
        plateau = 0;
      }
    }
  }
}

}  // namespace pitchstats::tcn
