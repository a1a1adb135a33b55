#include "pitchstats/nn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pitchstats/error.hpp"

namespace pitchstats::nn {

void FocalLossParams::validate(Index n_classes) const {
  if (gamma < 0 || !std::isfinite(gamma)) {
    throw ValidationError("focal loss gamma must be finite and >= 0");
  }
  if (clamp <= 0 || clamp >= 1) {
    throw ValidationError("focal loss clamp must be in (0, 1)");
  }
  if (static_cast<Index>(alpha.size()) != n_classes) {
    throw ValidationError("focal loss alpha must have one weight per class");
  }
  for (Scalar a : alpha) {
    if (!(a > 0 && a <= 1)) {
      throw ValidationError("focal loss alpha weights must lie in (0, 1]");
    }
  }
}

std::vector<Scalar> balanced_alpha(const std::vector<int>& labels, int n_classes) {
  if (n_classes < 2) throw ValidationError("need at least two classes");
  std::vector<Index> counts(static_cast<std::size_t>(n_classes), 0);
  for (int y : labels) {
    if (y < 0 || y >= n_classes) throw ValidationError("label out of range");
    ++counts[static_cast<std::size_t>(y)];
  }
  std::vector<Scalar> alpha(static_cast<std::size_t>(n_classes));
  Scalar peak = 0;
  for (int c = 0; c < n_classes; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0) {
      throw ValidationError("class " + std::to_string(c) + " has no samples");
    }
    alpha[static_cast<std::size_t>(c)] =
        Scalar(1) / static_cast<Scalar>(counts[static_cast<std::size_t>(c)]);
    peak = std::max(peak, alpha[static_cast<std::size_t>(c)]);
  }
  for (Scalar& a : alpha) a /= peak;
  return alpha;
}

std::vector<Scalar> uniform_alpha(int n_classes) {
  if (n_classes < 2) throw ValidationError("need at least two classes");
  return std::vector<Scalar>(static_cast<std::size_t>(n_classes), Scalar(1));
}

namespace {

void check_probs(const Tensor& probs, const std::vector<int>& targets,
                 const FocalLossParams& params) {
  if (probs.rank() != 2) throw ValidationError("focal loss probs must be B x C");
  const Index batch = probs.dim(0), classes = probs.dim(1);
  if (batch == 0) throw ValidationError("focal loss over an empty batch");
  params.validate(classes);
  if (static_cast<Index>(targets.size()) != batch) {
    throw ValidationError("focal loss needs one target per row");
  }
  for (int y : targets) {
    if (y < 0 || y >= classes) throw ValidationError("focal loss target out of range");
  }
  for (Index b = 0; b < batch; ++b) {
    Scalar sum = 0;
    for (Index c = 0; c < classes; ++c) sum += probs.at(b, c);
    if (std::abs(sum - Scalar(1)) > 1e-6) {
      throw ValidationError("focal loss rows must sum to 1 (row " +
                            std::to_string(b) + " sums to " + std::to_string(sum) +
                            ")");
    }
  }
}

}  // namespace

Scalar focal_loss_value(const Tensor& probs, const std::vector<int>& targets,
                        const FocalLossParams& params) {
  check_probs(probs, targets, params);
  const Index batch = probs.dim(0);
  Scalar total = 0;
  for (Index b = 0; b < batch; ++b) {
    const int y = targets[static_cast<std::size_t>(b)];
    const Scalar p =
        std::clamp(probs.at(b, y), params.clamp, Scalar(1) - params.clamp);
    total += -params.alpha[static_cast<std::size_t>(y)] *
             std::pow(Scalar(1) - p, params.gamma) * std::log(p);
  }
  return total / static_cast<Scalar>(batch);
}

NodeId focal_loss(Tape& tape, NodeId probs, const std::vector<int>& targets,
                  const FocalLossParams& params) {
  const Tensor& p = tape.value(probs);
  Tensor out({1});
  out[0] = focal_loss_value(p, targets, params);
  if (!tape.needs_grad(probs)) return tape.push(std::move(out), false, nullptr);
  return tape.push(std::move(out), true, [=](Tape& t, NodeId self) {
    const Tensor& pv = t.value(probs);
    const Index batch = pv.dim(0);
    const Scalar g_out = t.grad(self)[0];
    ArrayX g = ArrayX::Zero(pv.size());
    for (Index b = 0; b < batch; ++b) {
      const int y = targets[static_cast<std::size_t>(b)];
      const Scalar raw = pv.at(b, y);
      // Outside the clamp interval the loss is flat in p.
      if (raw <= params.clamp || raw >= Scalar(1) - params.clamp) continue;
      const Scalar rest = Scalar(1) - raw;
      const Scalar a = params.alpha[static_cast<std::size_t>(y)];
      // d/dp [-a (1-p)^g log p] = a*g*(1-p)^(g-1)*log p - a*(1-p)^g / p
      Scalar d = -a * std::pow(rest, params.gamma) / raw;
      if (params.gamma > 0 && rest > 0) {
        d += a * params.gamma * std::pow(rest, params.gamma - 1) * std::log(raw);
      }
      g[b * pv.dim(1) + y] = g_out * d / static_cast<Scalar>(batch);
    }
    t.accumulate(probs, g);
  });
}

}  // namespace pitchstats::nn
