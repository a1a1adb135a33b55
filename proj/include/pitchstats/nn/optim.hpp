#pragma once

#include <cstdint>
#include <vector>

#include "pitchstats/nn/tensor.hpp"

namespace pitchstats::nn {

enum class OptimAlgo { adam, adamw };

struct OptimConfig {
  OptimAlgo algo = OptimAlgo::adamw;
  Scalar lr = 1e-2;
  Scalar beta1 = 0.9;
  Scalar beta2 = 0.99;
  Scalar eps = 1e-8;
  Scalar weight_decay = 1e-4;

  void validate() const;
};

// Optimizer state: first/second moment estimates per parameter tensor plus
// the shared step counter used for bias correction.
struct OptimState {
  OptimConfig config;
  std::int64_t step_count = 0;
  std::vector<ArrayX> m;
  std::vector<ArrayX> v;

  explicit OptimState(OptimConfig cfg = {}) : config(cfg) { config.validate(); }

  void init(const std::vector<Tensor*>& params);
  bool initialized() const { return !m.empty(); }
};

// One update step. Adam applies weight decay by adding wd*p to the gradient
// (coupled L2); AdamW decays parameters directly before the adaptive update
// (decoupled). Both use bias-corrected moments:
//
//   m <- b1*m + (1-b1)*g        mhat = m / (1 - b1^t)
//   v <- b2*v + (1-b2)*g^2      vhat = v / (1 - b2^t)
//   p <- p - lr * mhat / (sqrt(vhat) + eps)
void optim_step(OptimState& state, const std::vector<Tensor*>& params,
                const std::vector<const Tensor*>& grads);

}  // namespace pitchstats::nn
