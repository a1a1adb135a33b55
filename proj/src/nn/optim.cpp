#include "pitchstats/nn/optim.hpp"

#include <cmath>

#include "pitchstats/error.hpp"

namespace pitchstats::nn {

void OptimConfig::validate() const {
  if (!(lr > 0)) throw ValidationError("learning rate must be > 0");
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1)) {
    throw ValidationError("optimizer betas must lie in [0, 1)");
  }
  if (!(eps > 0)) throw ValidationError("optimizer eps must be > 0");
  if (weight_decay < 0) throw ValidationError("weight decay must be >= 0");
}

void OptimState::init(const std::vector<Tensor*>& params) {
  m.clear();
  v.clear();
  m.reserve(params.size());
  v.reserve(params.size());
  for (const Tensor* p : params) {
    m.push_back(ArrayX::Zero(p->size()));
    v.push_back(ArrayX::Zero(p->size()));
  }
  step_count = 0;
}

void optim_step(OptimState& state, const std::vector<Tensor*>& params,
                const std::vector<const Tensor*>& grads) {
  if (!state.initialized()) state.init(params);
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw ValidationError("optim_step parameter/gradient/state count mismatch");
  }
  const OptimConfig& cfg = state.config;
  ++state.step_count;
  const Scalar t = static_cast<Scalar>(state.step_count);
  const Scalar bias1 = Scalar(1) - std::pow(cfg.beta1, t);
  const Scalar bias2 = Scalar(1) - std::pow(cfg.beta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    const Tensor& g = *grads[i];
    if (p.size() != g.size() || p.size() != state.m[i].size()) {
      throw ValidationError("optim_step tensor size mismatch");
    }
    ArrayX grad = g.array();
    if (cfg.weight_decay > 0) {
      if (cfg.algo == OptimAlgo::adam) {
        grad += cfg.weight_decay * p.array();
      } else {
        p.array() -= cfg.lr * cfg.weight_decay * p.array();
      }
    }
    state.m[i] = cfg.beta1 * state.m[i] + (Scalar(1) - cfg.beta1) * grad;
    state.v[i] = cfg.beta2 * state.v[i] + (Scalar(1) - cfg.beta2) * grad.square();
    p.array() -= cfg.lr * (state.m[i] / bias1) /
                 ((state.v[i] / bias2).sqrt() + cfg.eps);
  }
}

}  // namespace pitchstats::nn
