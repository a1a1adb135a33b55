#pragma once

#include "pitchstats/nn/tensor.hpp"
#include "pitchstats/rng.hpp"

namespace pitchstats::nn {

// ---------------------------------------------------------------------------
// Dilated 1-d convolution over batch × channel × time tensors.
//
//   input  B × C_in × N
//   kernel C_out × C_in × K   (K odd; taps centered, zero "same" padding)
//   bias   C_out
//   output B × C_out × N
//
// output[b,o,t] = bias[o] + sum_{i,j} kernel[o,i,j] * input[b,i,t + (j-K/2)*d]
// with out-of-range input treated as zero.
// ---------------------------------------------------------------------------
Tensor conv1d_dilated(const Tensor& input, const Tensor& kernel,
                      const Tensor& bias, int dilation);

// Gradients of conv1d_dilated. Null destinations are skipped.
void conv1d_backward(const Tensor& input, const Tensor& kernel, int dilation,
                     const Tensor& grad_output, Tensor* grad_input,
                     Tensor* grad_kernel, Tensor* grad_bias);

// ---------------------------------------------------------------------------
// Per-channel batch normalization over (batch, time) for B × C × N tensors.
// Training mode normalizes with biased batch statistics and folds them into
// the running estimates (momentum-weighted; running variance uses the
// unbiased form). Eval mode normalizes with the running estimates.
// ---------------------------------------------------------------------------
struct BatchNormCache {
  Tensor xhat;    // normalized input, B × C × N
  ArrayX inv_std; // per channel
};

Tensor batchnorm1d_train(const Tensor& input, const Tensor& gamma,
                         const Tensor& beta, Tensor& running_mean,
                         Tensor& running_var, Scalar momentum, Scalar eps,
                         BatchNormCache* cache);

Tensor batchnorm1d_eval(const Tensor& input, const Tensor& gamma,
                        const Tensor& beta, const Tensor& running_mean,
                        const Tensor& running_var, Scalar eps);

void batchnorm1d_backward(const BatchNormCache& cache, const Tensor& gamma,
                          const Tensor& grad_output, Tensor* grad_input,
                          Tensor* grad_gamma, Tensor* grad_beta);

// ---------------------------------------------------------------------------
// Fully connected layer: x (B × F) · weight (H × F)^T + bias (H) -> B × H.
// ---------------------------------------------------------------------------
Tensor linear_forward(const Tensor& x, const Tensor& weight, const Tensor& bias);

void linear_backward(const Tensor& x, const Tensor& weight,
                     const Tensor& grad_output, Tensor* grad_x,
                     Tensor* grad_weight, Tensor* grad_bias);

// ---------------------------------------------------------------------------
// Shape-preserving nonlinearities and reductions.
// ---------------------------------------------------------------------------
Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);

// Row-wise softmax of a B × C matrix of logits (max-shifted for stability).
Tensor softmax_rows(const Tensor& logits);

// Mean over the time axis: B × C × N -> B × C.
Tensor global_avg_pool(const Tensor& x);

}  // namespace pitchstats::nn
