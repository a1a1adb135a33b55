#include "pitchstats/tcn/model.hpp"

#include <cmath>
#include <string>

#include "pitchstats/error.hpp"

namespace pitchstats::tcn {

void TcnConfig::validate() const {
  if (in_channels < 1) throw ValidationError("in_channels must be >= 1");
  if (static_cast<int>(block_channels.size()) != kNumBlocks) {
    throw ValidationError("exactly " + std::to_string(kNumBlocks) +
                          " block widths required");
  }
  for (int c : block_channels) {
    if (c < 1) throw ValidationError("block widths must be >= 1");
  }
  if (kernel_size < 1 || kernel_size % 2 == 0) {
    throw ValidationError("kernel_size must be odd and >= 1");
  }
  if (static_cast<int>(dilations.size()) != kNumBlocks) {
    throw ValidationError("one dilation per block required");
  }
  for (std::size_t i = 0; i < dilations.size(); ++i) {
    if (dilations[i] < 1) throw ValidationError("dilations must be >= 1");
    if (i > 0 && dilations[i] <= dilations[i - 1]) {
      throw ValidationError("dilations must be strictly increasing");
    }
  }
  if (!(dropout_rate >= 0 && dropout_rate < 1)) {
    throw ValidationError("dropout_rate must be in [0, 1)");
  }
  const int deepest_span = (kernel_size - 1) * dilations.back() + 1;
  if (seq_len < deepest_span) {
    throw ValidationError("seq_len " + std::to_string(seq_len) +
                          " is shorter than the deepest block's span " +
                          std::to_string(deepest_span));
  }
  if (fc_hidden < 0) throw ValidationError("fc_hidden must be >= 0");
}

int TcnConfig::hidden_dim() const {
  if (fc_hidden > 0) return fc_hidden;
  return std::max(8, block_channels.back() / 2);
}

int TcnConfig::receptive_half_width() const {
  int half = 0;
  for (int d : dilations) half += d * (kernel_size - 1) / 2;
  return half;
}

TcnModel::TcnModel(TcnConfig config, std::uint64_t seed)
    : TcnModel(std::move(config), seed, /*initialize=*/true) {}

TcnModel::TcnModel(TcnConfig config, std::uint64_t seed, bool initialize)
    : config_(std::move(config)), seed_(seed) {
  config_.validate();
  allocate();
  if (initialize) initialize_weights();
}

void TcnModel::allocate() {
  blocks_.clear();
  blocks_.resize(TcnConfig::kNumBlocks);
  int prev = config_.in_channels;
  for (int i = 0; i < TcnConfig::kNumBlocks; ++i) {
    TcnBlock& block = blocks_[static_cast<std::size_t>(i)];
    const int width = config_.block_channels[static_cast<std::size_t>(i)];
    block.conv.kernel = nn::Tensor({width, prev, config_.kernel_size});
    block.conv.bias = nn::Tensor({width});
    block.conv.dilation = config_.dilations[static_cast<std::size_t>(i)];
    block.norm.gamma = nn::Tensor({width});
    block.norm.beta = nn::Tensor({width});
    block.norm.running_mean = nn::Tensor({width});
    block.norm.running_var = nn::Tensor({width});
    block.has_projection = prev != width;
    if (block.has_projection) {
      block.skip_proj.kernel = nn::Tensor({width, prev, 1});
      block.skip_proj.bias = nn::Tensor({width});
      block.skip_proj.dilation = 1;
    }
    prev = width;
  }
  const int hidden = config_.hidden_dim();
  fc1_.weight = nn::Tensor({hidden, prev});
  fc1_.bias = nn::Tensor({hidden});
  fc2_.weight = nn::Tensor({config_.head_dim(), hidden});
  fc2_.bias = nn::Tensor({config_.head_dim()});
}

void TcnModel::initialize_weights() {
  Rng rng(seed_);
  auto he_fill = [&rng](nn::Tensor& t, Index fan_in) {
    const Scalar stddev = std::sqrt(Scalar(2) / static_cast<Scalar>(fan_in));
    for (Index i = 0; i < t.size(); ++i) t[i] = rng.normal(0, stddev);
  };
  for (TcnBlock& block : blocks_) {
    he_fill(block.conv.kernel,
            block.conv.kernel.dim(1) * block.conv.kernel.dim(2));
    if (block.has_projection) {
      he_fill(block.skip_proj.kernel, block.skip_proj.kernel.dim(1));
    }
    block.norm.gamma.array().setOnes();
    block.norm.running_var.array().setOnes();
  }
  he_fill(fc1_.weight, fc1_.weight.dim(1));
  // Pre-head layer keeps unit-variance activations (no ReLU after it).
  const Scalar out_std =
      std::sqrt(Scalar(1) / static_cast<Scalar>(fc2_.weight.dim(1)));
  for (Index i = 0; i < fc2_.weight.size(); ++i) {
    fc2_.weight[i] = rng.normal(0, out_std);
  }
}

std::vector<nn::Tensor*> TcnModel::parameters() {
  std::vector<nn::Tensor*> params;
  for (TcnBlock& block : blocks_) {
    params.push_back(&block.conv.kernel);
    params.push_back(&block.conv.bias);
    params.push_back(&block.norm.gamma);
    params.push_back(&block.norm.beta);
    if (block.has_projection) {
      params.push_back(&block.skip_proj.kernel);
      params.push_back(&block.skip_proj.bias);
    }
  }
  params.push_back(&fc1_.weight);
  params.push_back(&fc1_.bias);
  params.push_back(&fc2_.weight);
  params.push_back(&fc2_.bias);
  return params;
}

std::vector<const nn::Tensor*> TcnModel::state_tensors() const {
  auto mutable_view = const_cast<TcnModel*>(this)->state_tensors();
  return {mutable_view.begin(), mutable_view.end()};
}

std::vector<nn::Tensor*> TcnModel::state_tensors() {
  std::vector<nn::Tensor*> tensors;
  for (TcnBlock& block : blocks_) {
    tensors.push_back(&block.conv.kernel);
    tensors.push_back(&block.conv.bias);
    tensors.push_back(&block.norm.gamma);
    tensors.push_back(&block.norm.beta);
    tensors.push_back(&block.norm.running_mean);
    tensors.push_back(&block.norm.running_var);
    if (block.has_projection) {
      tensors.push_back(&block.skip_proj.kernel);
      tensors.push_back(&block.skip_proj.bias);
    }
  }
  tensors.push_back(&fc1_.weight);
  tensors.push_back(&fc1_.bias);
  tensors.push_back(&fc2_.weight);
  tensors.push_back(&fc2_.bias);
  return tensors;
}

nn::Tensor to_input_tensor(const pose::PoseBatch& batch) {
  const Index b_count = batch.size();
  const Index frames = batch.seq_len;
  nn::Tensor input({b_count, frames, pose::kNumJoints, pose::kNumCoords});
  Index idx = 0;
  for (Index b = 0; b < b_count; ++b) {
    const pose::PoseSequence& seq = batch.sequences[static_cast<std::size_t>(b)];
    for (Index n = 0; n < frames; ++n) {
      const pose::PoseFrame& frame = seq.frame(n);
      for (int k = 0; k < pose::kNumJoints; ++k) {
        const bool valid = frame.valid_mask[static_cast<std::size_t>(k)];
        for (int c = 0; c < pose::kNumCoords; ++c) {
          input[idx++] = valid ? frame.joints(k, c) : Scalar(0);
        }
      }
    }
  }
  return input;
}

namespace {

// B x N x K x C -> B x (K*C) x N channel-major layout for the conv stack.
nn::Tensor reshape_to_channels(const nn::Tensor& batch, const TcnConfig& config) {
  if (batch.rank() != 4) {
    throw ValidationError("tcn input must be B x N x K x C");
  }
  const Index b_count = batch.dim(0), frames = batch.dim(1);
  const Index channels = batch.dim(2) * batch.dim(3);
  if (frames != config.seq_len) {
    throw ValidationError("tcn input has " + std::to_string(frames) +
                          " frames, model expects " +
                          std::to_string(config.seq_len));
  }
  if (channels != config.in_channels) {
    throw ValidationError("tcn input has " + std::to_string(channels) +
                          " channels per frame, model expects " +
                          std::to_string(config.in_channels));
  }
  nn::Tensor out({b_count, channels, frames});
  for (Index b = 0; b < b_count; ++b) {
    const Scalar* src = batch.data() + b * frames * channels;
    for (Index n = 0; n < frames; ++n) {
      for (Index ch = 0; ch < channels; ++ch) {
        out.row(b, ch)[n] = src[n * channels + ch];
      }
    }
  }
  return out;
}

struct ForwardRefs {
  nn::NodeId output;
  std::vector<nn::NodeId> param_nodes;
};

ForwardRefs run_forward(nn::Tape& tape, TcnModel& model, const nn::Tensor& batch,
                        bool training, bool requires_grad, Rng& rng,
                        bool stop_before_pool) {
  const TcnConfig& config = model.config();
  nn::NodeId x = tape.leaf(reshape_to_channels(batch, config), false);

  std::vector<nn::NodeId> param_nodes;
  auto param = [&](nn::Tensor& t) {
    const nn::NodeId id = tape.leaf(t, requires_grad);
    param_nodes.push_back(id);
    return id;
  };

  for (TcnBlock& block : model.blocks()) {
    const nn::NodeId kernel = param(block.conv.kernel);
    const nn::NodeId bias = param(block.conv.bias);
    const nn::NodeId gamma = param(block.norm.gamma);
    const nn::NodeId beta = param(block.norm.beta);
    nn::NodeId h = nn::conv1d(tape, x, kernel, bias, block.conv.dilation);
    h = nn::batchnorm1d(tape, h, gamma, beta, block.norm.running_mean,
                        block.norm.running_var, training, block.norm.momentum,
                        block.norm.eps);
    h = nn::relu(tape, h);
    h = nn::dropout(tape, h, config.dropout_rate, training, rng);
    nn::NodeId skip = x;
    if (block.has_projection) {
      const nn::NodeId p_kernel = param(block.skip_proj.kernel);
      const nn::NodeId p_bias = param(block.skip_proj.bias);
      skip = nn::conv1d(tape, x, p_kernel, p_bias, 1);
    }
    x = nn::add(tape, h, skip);
  }

  if (stop_before_pool) return {x, std::move(param_nodes)};

  nn::NodeId h = nn::global_avg_pool(tape, x);
  const nn::NodeId w1 = param(model.fc1().weight);
  const nn::NodeId b1 = param(model.fc1().bias);
  h = nn::relu(tape, nn::linear(tape, h, w1, b1));
  const nn::NodeId w2 = param(model.fc2().weight);
  const nn::NodeId b2 = param(model.fc2().bias);
  h = nn::linear(tape, h, w2, b2);
  h = config.head == Head::role4 ? nn::softmax(tape, h) : nn::sigmoid(tape, h);
  return {h, std::move(param_nodes)};
}

}  // namespace

TcnForward tcn_forward(nn::Tape& tape, TcnModel& model, const nn::Tensor& batch,
                       bool training, Rng& rng) {
  ForwardRefs refs = run_forward(tape, model, batch, training,
                                 /*requires_grad=*/true, rng,
                                 /*stop_before_pool=*/false);
  return {refs.output, std::move(refs.param_nodes)};
}

nn::Tensor TcnModel::predict(const nn::Tensor& batch) const {
  nn::Tape tape;
  Rng rng(0);  // unused: no dropout in eval mode
  TcnModel& self = const_cast<TcnModel&>(*this);
  ForwardRefs refs = run_forward(tape, self, batch, /*training=*/false,
                                 /*requires_grad=*/false, rng,
                                 /*stop_before_pool=*/false);
  return tape.value(refs.output);
}

nn::Tensor TcnModel::features(const nn::Tensor& batch) const {
  nn::Tape tape;
  Rng rng(0);
  TcnModel& self = const_cast<TcnModel&>(*this);
  ForwardRefs refs = run_forward(tape, self, batch, /*training=*/false,
                                 /*requires_grad=*/false, rng,
                                 /*stop_before_pool=*/true);
  return tape.value(refs.output);
}

}  // namespace pitchstats::tcn
