#pragma once

#include <functional>
#include <vector>

#include "pitchstats/nn/ops.hpp"
#include "pitchstats/nn/tensor.hpp"
#include "pitchstats/rng.hpp"

namespace pitchstats::nn {

using NodeId = int;

// Reverse-mode autodiff tape at tensor granularity. Forward ops append
// nodes; creation order is a topological order, so backward() is a single
// reverse sweep that calls each node's pull-back exactly once. Nodes not on
// a path from a grad-requiring leaf carry no backward closure and no
// gradient buffer.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, NodeId)>;

  NodeId leaf(Tensor value, bool requires_grad = false);

  // Appends a computed node. `needs_grad` must be the OR of the inputs'
  // needs_grad flags; `fn` pulls this node's gradient back to its inputs.
  NodeId push(Tensor value, bool needs_grad, BackwardFn fn);

  const Tensor& value(NodeId id) const { return nodes_[check(id)].value; }
  Tensor& value(NodeId id) { return nodes_[check(id)].value; }

  bool needs_grad(NodeId id) const { return nodes_[check(id)].needs_grad; }

  // Gradient of the last backward() root w.r.t. node `id`; zeros if the node
  // was not reached.
  const Tensor& grad(NodeId id);

  // Adds `g` into the node's gradient buffer (no-op for nodes that do not
  // need gradients).
  void accumulate(NodeId id, const ArrayX& g);

  // Seeds the root gradient with ones and runs the reverse sweep.
  void backward(NodeId root);

  std::size_t size() const { return nodes_.size(); }
  void clear() { nodes_.clear(); }

 private:
  struct Node {
    Tensor value;
    Tensor gradient;
    bool needs_grad = false;
    bool grad_ready = false;
    BackwardFn backward;
  };

  NodeId check(NodeId id) const;
  Node& ensure_grad(NodeId id);

  std::vector<Node> nodes_;
};

// Tape-recorded ops. Each forwards via the kernels in ops.hpp and registers
// the matching pull-back.
NodeId conv1d(Tape& tape, NodeId input, NodeId kernel, NodeId bias, int dilation);

// Training-mode batchnorm normalizes with batch statistics and updates the
// running estimates in place; eval mode uses them read-only.
NodeId batchnorm1d(Tape& tape, NodeId input, NodeId gamma, NodeId beta,
                   Tensor& running_mean, Tensor& running_var, bool training,
                   Scalar momentum, Scalar eps);

NodeId relu(Tape& tape, NodeId input);

// Inverted dropout: keep with probability 1-rate and scale kept values by
// 1/(1-rate). Identity when not training or rate == 0.
NodeId dropout(Tape& tape, NodeId input, Scalar rate, bool training, Rng& rng);

NodeId linear(Tape& tape, NodeId input, NodeId weight, NodeId bias);
NodeId add(Tape& tape, NodeId a, NodeId b);
NodeId global_avg_pool(Tape& tape, NodeId input);
NodeId softmax(Tape& tape, NodeId logits);
NodeId sigmoid(Tape& tape, NodeId logits);

// B x 1 sigmoid outputs -> B x 2 two-class distribution (1-p, p).
NodeId binary_pair(Tape& tape, NodeId probs);

}  // namespace pitchstats::nn
