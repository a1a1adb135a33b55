#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pitchstats/nn/tape.hpp"
#include "pitchstats/nn/tensor.hpp"
#include "pitchstats/pose/sequence.hpp"
#include "pitchstats/rng.hpp"

namespace pitchstats::tcn {

enum class Head { role4, binary };

// Architecture of the five-block temporal convolutional classifier: each
// block is dilated conv -> batchnorm -> ReLU -> dropout with an additive
// skip connection (1x1 projection when widths differ), followed by global
// average pooling over time and two fully connected layers into the head.
struct TcnConfig {
  int in_channels = pose::kNumJoints * pose::kNumCoords;
  std::vector<int> block_channels = {64, 64, 128, 128, 256};
  int kernel_size = 3;
  std::vector<int> dilations = {1, 2, 4, 8, 16};
  Scalar dropout_rate = 0.2;
  Head head = Head::role4;
  int seq_len = 100;
  int fc_hidden = 0;  // 0 = half the last block width, at least 8

  static constexpr int kNumBlocks = 5;

  void validate() const;
  int head_dim() const { return head == Head::role4 ? pose::kNumRoles : 1; }
  int n_classes() const { return head == Head::role4 ? pose::kNumRoles : 2; }
  int hidden_dim() const;
  // Half-width of the pooled representation's receptive field:
  // sum_i d_i * (k-1)/2 frames on each side.
  int receptive_half_width() const;

  bool operator==(const TcnConfig&) const = default;
};

struct Conv1dLayer {
  nn::Tensor kernel;  // C_out x C_in x K
  nn::Tensor bias;    // C_out
  int dilation = 1;
};

struct BatchNormLayer {
  nn::Tensor gamma, beta;
  nn::Tensor running_mean, running_var;
  Scalar momentum = 0.1;
  Scalar eps = 1e-5;
};

struct LinearLayer {
  nn::Tensor weight;  // H x F
  nn::Tensor bias;    // H
};

struct TcnBlock {
  Conv1dLayer conv;
  BatchNormLayer norm;
  bool has_projection = false;
  Conv1dLayer skip_proj;  // 1x1, present when channel widths differ
};

class TcnModel {
 public:
  TcnModel() = default;

  // Validates the config and draws initial weights from `seed` (He-scaled
  // normals for conv/fc kernels, zero biases, identity batchnorm).
  TcnModel(TcnConfig config, std::uint64_t seed);

  const TcnConfig& config() const { return config_; }
  std::uint64_t init_seed() const { return seed_; }

  std::vector<TcnBlock>& blocks() { return blocks_; }
  const std::vector<TcnBlock>& blocks() const { return blocks_; }
  LinearLayer& fc1() { return fc1_; }
  const LinearLayer& fc1() const { return fc1_; }
  LinearLayer& fc2() { return fc2_; }
  const LinearLayer& fc2() const { return fc2_; }

  // Trainable tensors in declaration order.
  std::vector<nn::Tensor*> parameters();
  // Trainable tensors plus batchnorm running statistics, declaration order;
  // this is the persistence order of the model file.
  std::vector<nn::Tensor*> state_tensors();
  std::vector<const nn::Tensor*> state_tensors() const;

  // Eval-mode head probabilities for a B x N x K x C batch (B x 4 for the
  // role head, B x 1 for binary). No tape, no dropout, running-stat
  // batchnorm.
  nn::Tensor predict(const nn::Tensor& batch) const;

  // Eval-mode pre-pooling activations, B x C_last x N.
  nn::Tensor features(const nn::Tensor& batch) const;

 private:
  friend TcnModel load_model(const std::string& path);

  TcnModel(TcnConfig config, std::uint64_t seed, bool initialize);
  void allocate();
  void initialize_weights();

  TcnConfig config_;
  std::uint64_t seed_ = 0;
  std::vector<TcnBlock> blocks_;
  LinearLayer fc1_, fc2_;
};

// Flattens a pose batch into the network input tensor, B x N x K x C, with
// invalid joints zero-filled per each frame's valid_mask.
nn::Tensor to_input_tensor(const pose::PoseBatch& batch);

// Tape-recorded forward pass. `batch` is B x N x K x C with N == seq_len
// and K*C == in_channels (reshaped internally to B x (K*C) x N). Output is
// the head probability node (B x 4 softmax, or B x 1 sigmoid);
// `param_nodes` aligns with model.parameters(). Training mode draws dropout
// masks from `rng` and updates batchnorm running statistics.
struct TcnForward {
  nn::NodeId output = -1;
  std::vector<nn::NodeId> param_nodes;
};

TcnForward tcn_forward(nn::Tape& tape, TcnModel& model, const nn::Tensor& batch,
                       bool training, Rng& rng);

}  // namespace pitchstats::tcn
