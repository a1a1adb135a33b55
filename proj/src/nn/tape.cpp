#include "pitchstats/nn/tape.hpp"

#include <memory>
#include <utility>

#include "pitchstats/error.hpp"

namespace pitchstats::nn {

NodeId Tape::leaf(Tensor value, bool requires_grad) {
  Node node;
  node.value = std::move(value);
  node.needs_grad = requires_grad;
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size()) - 1;
}

NodeId Tape::push(Tensor value, bool needs_grad, BackwardFn fn) {
  Node node;
  node.value = std::move(value);
  node.needs_grad = needs_grad;
  if (needs_grad) node.backward = std::move(fn);
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size()) - 1;
}

NodeId Tape::check(NodeId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) {
    throw ValidationError("tape node id out of range");
  }
  return id;
}

Tape::Node& Tape::ensure_grad(NodeId id) {
  Node& node = nodes_[check(id)];
  if (!node.grad_ready) {
    node.gradient = Tensor(node.value.shape());
    node.grad_ready = true;
  }
  return node;
}

const Tensor& Tape::grad(NodeId id) { return ensure_grad(id).gradient; }

void Tape::accumulate(NodeId id, const ArrayX& g) {
  Node& node = nodes_[check(id)];
  if (!node.needs_grad) return;
  ensure_grad(id);
  if (node.gradient.size() != g.size()) {
    throw ValidationError("gradient size mismatch in accumulate");
  }
  node.gradient.array() += g;
}

void Tape::backward(NodeId root) {
  check(root);
  if (!nodes_[root].needs_grad) {
    throw ValidationError("backward root does not require gradients");
  }
  Node& seed = ensure_grad(root);
  seed.gradient.array().setOnes();
  for (NodeId id = root; id >= 0; --id) {
    Node& node = nodes_[id];
    if (node.grad_ready && node.backward) node.backward(*this, id);
  }
}

// --- op wrappers -----------------------------------------------------------

NodeId conv1d(Tape& tape, NodeId input, NodeId kernel, NodeId bias, int dilation) {
  Tensor out = conv1d_dilated(tape.value(input), tape.value(kernel),
                              tape.value(bias), dilation);
  const bool needs = tape.needs_grad(input) || tape.needs_grad(kernel) ||
                     tape.needs_grad(bias);
  return tape.push(std::move(out), needs, [=](Tape& t, NodeId self) {
    Tensor g_input, g_kernel, g_bias;
    conv1d_backward(t.value(input), t.value(kernel), dilation, t.grad(self),
                    t.needs_grad(input) ? &g_input : nullptr,
                    t.needs_grad(kernel) ? &g_kernel : nullptr,
                    t.needs_grad(bias) ? &g_bias : nullptr);
    if (t.needs_grad(input)) t.accumulate(input, g_input.array());
    if (t.needs_grad(kernel)) t.accumulate(kernel, g_kernel.array());
    if (t.needs_grad(bias)) t.accumulate(bias, g_bias.array());
  });
}

NodeId batchnorm1d(Tape& tape, NodeId input, NodeId gamma, NodeId beta,
                   Tensor& running_mean, Tensor& running_var, bool training,
                   Scalar momentum, Scalar eps) {
  const bool needs = tape.needs_grad(input) || tape.needs_grad(gamma) ||
                     tape.needs_grad(beta);
  if (!training) {
    Tensor out = batchnorm1d_eval(tape.value(input), tape.value(gamma),
                                  tape.value(beta), running_mean, running_var, eps);
    if (!needs) return tape.push(std::move(out), false, nullptr);
    // Eval-mode normalization is affine per channel; reuse the train-mode
    // pull-back with a cache built from the running statistics.
    auto cache = std::make_shared<BatchNormCache>();
    const Tensor& x = tape.value(input);
    const Index channels = x.dim(1);
    cache->inv_std = ArrayX(channels);
    for (Index c = 0; c < channels; ++c) {
      cache->inv_std[c] = Scalar(1) / std::sqrt(running_var[c] + eps);
    }
    cache->xhat = Tensor(x.shape());
    for (Index b = 0; b < x.dim(0); ++b) {
      for (Index c = 0; c < channels; ++c) {
        const Scalar* src = x.row(b, c);
        Scalar* dst = cache->xhat.row(b, c);
        for (Index t = 0; t < x.dim(2); ++t) {
          dst[t] = (src[t] - running_mean[c]) * cache->inv_std[c];
        }
      }
    }
    return tape.push(std::move(out), true, [=](Tape& t, NodeId self) {
      // Running stats are constants here, so grad_input is just the affine
      // scale; the batch-statistic terms of the train-mode formula must not
      // be applied.
      const Tensor& g = t.grad(self);
      if (t.needs_grad(gamma) || t.needs_grad(beta)) {
        Tensor g_gamma, g_beta;
        batchnorm1d_backward(*cache, t.value(gamma), g, nullptr,
                             t.needs_grad(gamma) ? &g_gamma : nullptr,
                             t.needs_grad(beta) ? &g_beta : nullptr);
        if (t.needs_grad(gamma)) t.accumulate(gamma, g_gamma.array());
        if (t.needs_grad(beta)) t.accumulate(beta, g_beta.array());
      }
      if (t.needs_grad(input)) {
        Tensor g_input(g.shape());
        for (Index b = 0; b < g.dim(0); ++b) {
          for (Index c = 0; c < g.dim(1); ++c) {
            const Scalar scale = t.value(gamma)[c] * cache->inv_std[c];
            const Scalar* src = g.row(b, c);
            Scalar* dst = g_input.row(b, c);
            for (Index u = 0; u < g.dim(2); ++u) dst[u] = scale * src[u];
          }
        }
        t.accumulate(input, g_input.array());
      }
    });
  }

  auto cache = std::make_shared<BatchNormCache>();
  Tensor out = batchnorm1d_train(tape.value(input), tape.value(gamma),
                                 tape.value(beta), running_mean, running_var,
                                 momentum, eps, cache.get());
  if (!needs) return tape.push(std::move(out), false, nullptr);
  return tape.push(std::move(out), true, [=](Tape& t, NodeId self) {
    Tensor g_input, g_gamma, g_beta;
    batchnorm1d_backward(*cache, t.value(gamma), t.grad(self),
                         t.needs_grad(input) ? &g_input : nullptr,
                         t.needs_grad(gamma) ? &g_gamma : nullptr,
                         t.needs_grad(beta) ? &g_beta : nullptr);
    if (t.needs_grad(input)) t.accumulate(input, g_input.array());
    if (t.needs_grad(gamma)) t.accumulate(gamma, g_gamma.array());
    if (t.needs_grad(beta)) t.accumulate(beta, g_beta.array());
  });
}

NodeId relu(Tape& tape, NodeId input) {
  Tensor out = nn::relu(tape.value(input));
  if (!tape.needs_grad(input)) return tape.push(std::move(out), false, nullptr);
  return tape.push(std::move(out), true, [=](Tape& t, NodeId self) {
    const ArrayX mask =
        (t.value(self).array() > Scalar(0)).cast<Scalar>();
    t.accumulate(input, t.grad(self).array() * mask);
  });
}

NodeId dropout(Tape& tape, NodeId input, Scalar rate, bool training, Rng& rng) {
  if (rate < 0 || rate >= 1) {
    throw ValidationError("dropout rate must be in [0, 1)");
  }
  if (!training || rate == Scalar(0)) {
    Tensor out = tape.value(input);
    if (!tape.needs_grad(input)) return tape.push(std::move(out), false, nullptr);
    return tape.push(std::move(out), true, [=](Tape& t, NodeId self) {
      t.accumulate(input, t.grad(self).array());
    });
  }
  const Tensor& x = tape.value(input);
  auto mask = std::make_shared<ArrayX>(x.size());
  const Scalar scale = Scalar(1) / (Scalar(1) - rate);
  for (Index i = 0; i < x.size(); ++i) {
    (*mask)[i] = rng.uniform() < rate ? Scalar(0) : scale;
  }
  Tensor out = Tensor::from_array(x.shape(), x.array() * (*mask));
  if (!tape.needs_grad(input)) return tape.push(std::move(out), false, nullptr);
  return tape.push(std::move(out), true, [=](Tape& t, NodeId self) {
    t.accumulate(input, t.grad(self).array() * (*mask));
  });
}

NodeId linear(Tape& tape, NodeId input, NodeId weight, NodeId bias) {
  Tensor out = linear_forward(tape.value(input), tape.value(weight), tape.value(bias));
  const bool needs = tape.needs_grad(input) || tape.needs_grad(weight) ||
                     tape.needs_grad(bias);
  return tape.push(std::move(out), needs, [=](Tape& t, NodeId self) {
    Tensor g_input, g_weight, g_bias;
    linear_backward(t.value(input), t.value(weight), t.grad(self),
                    t.needs_grad(input) ? &g_input : nullptr,
                    t.needs_grad(weight) ? &g_weight : nullptr,
                    t.needs_grad(bias) ? &g_bias : nullptr);
    if (t.needs_grad(input)) t.accumulate(input, g_input.array());
    if (t.needs_grad(weight)) t.accumulate(weight, g_weight.array());
    if (t.needs_grad(bias)) t.accumulate(bias, g_bias.array());
  });
}

NodeId add(Tape& tape, NodeId a, NodeId b) {
  const Tensor& lhs = tape.value(a);
  const Tensor& rhs = tape.value(b);
  if (!lhs.same_shape(rhs)) {
    throw ValidationError("add shape mismatch: " + lhs.shape_string() + " vs " +
                          rhs.shape_string());
  }
  Tensor out = Tensor::from_array(lhs.shape(), lhs.array() + rhs.array());
  const bool needs = tape.needs_grad(a) || tape.needs_grad(b);
  return tape.push(std::move(out), needs, [=](Tape& t, NodeId self) {
    t.accumulate(a, t.grad(self).array());
    t.accumulate(b, t.grad(self).array());
  });
}

NodeId global_avg_pool(Tape& tape, NodeId input) {
  Tensor out = nn::global_avg_pool(tape.value(input));
  const Index frames = tape.value(input).dim(2);
  if (!tape.needs_grad(input)) return tape.push(std::move(out), false, nullptr);
  return tape.push(std::move(out), true, [=](Tape& t, NodeId self) {
    const Tensor& g = t.grad(self);
    Tensor g_input(t.value(input).shape());
    const Scalar inv = Scalar(1) / static_cast<Scalar>(frames);
    for (Index b = 0; b < g_input.dim(0); ++b) {
      for (Index c = 0; c < g_input.dim(1); ++c) {
        const Scalar v = g.at(b, c) * inv;
        Scalar* dst = g_input.row(b, c);
        for (Index u = 0; u < frames; ++u) dst[u] = v;
      }
    }
    t.accumulate(input, g_input.array());
  });
}

NodeId softmax(Tape& tape, NodeId logits) {
  Tensor out = softmax_rows(tape.value(logits));
  if (!tape.needs_grad(logits)) return tape.push(std::move(out), false, nullptr);
  return tape.push(std::move(out), true, [=](Tape& t, NodeId self) {
    const auto p = t.value(self).matrix();
    const auto g = t.grad(self).matrix();
    Tensor g_logits({p.rows(), p.cols()});
    auto dst = g_logits.matrix();
    for (Index r = 0; r < p.rows(); ++r) {
      const Scalar dot = (g.row(r).array() * p.row(r).array()).sum();
      dst.row(r) = (g.row(r).array() - dot) * p.row(r).array();
    }
    t.accumulate(logits, g_logits.array());
  });
}

NodeId sigmoid(Tape& tape, NodeId logits) {
  Tensor out = nn::sigmoid(tape.value(logits));
  if (!tape.needs_grad(logits)) return tape.push(std::move(out), false, nullptr);
  return tape.push(std::move(out), true, [=](Tape& t, NodeId self) {
    const ArrayX& p = t.value(self).array();
    t.accumulate(logits, t.grad(self).array() * p * (Scalar(1) - p));
  });
}

NodeId binary_pair(Tape& tape, NodeId probs) {
  const Tensor& p = tape.value(probs);
  if (p.rank() != 2 || p.dim(1) != 1) {
    throw ValidationError("binary_pair input must be B x 1");
  }
  const Index batch = p.dim(0);
  Tensor out({batch, 2});
  for (Index b = 0; b < batch; ++b) {
    out.at(b, 0) = Scalar(1) - p.at(b, 0);
    out.at(b, 1) = p.at(b, 0);
  }
  if (!tape.needs_grad(probs)) return tape.push(std::move(out), false, nullptr);
  return tape.push(std::move(out), true, [=](Tape& t, NodeId self) {
    const Tensor& g = t.grad(self);
    ArrayX g_p(batch);
    for (Index b = 0; b < batch; ++b) g_p[b] = g.at(b, 1) - g.at(b, 0);
    t.accumulate(probs, g_p);
  });
}

}  // namespace pitchstats::nn
