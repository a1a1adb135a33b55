#include "pitchstats/nn/ops.hpp"

#include <algorithm>
#include <cmath>

#include "pitchstats/error.hpp"
#include "pitchstats/nn/threading.hpp"

namespace pitchstats::nn {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw ValidationError(what);
}

// Dot product with a fixed reduction tree: eight interleaved accumulators
// combined pairwise, so the summation order never depends on vector width
// or thread count.
Scalar dot_fixed(const Scalar* a, const Scalar* b, Index n) {
  Scalar acc0 = 0, acc1 = 0, acc2 = 0, acc3 = 0;
  Scalar acc4 = 0, acc5 = 0, acc6 = 0, acc7 = 0;
  Index t = 0;
  for (; t + 8 <= n; t += 8) {
    acc0 += a[t] * b[t];
    acc1 += a[t + 1] * b[t + 1];
    acc2 += a[t + 2] * b[t + 2];
    acc3 += a[t + 3] * b[t + 3];
    acc4 += a[t + 4] * b[t + 4];
    acc5 += a[t + 5] * b[t + 5];
    acc6 += a[t + 6] * b[t + 6];
    acc7 += a[t + 7] * b[t + 7];
  }
  Scalar tail = 0;
  for (; t < n; ++t) tail += a[t] * b[t];
  return (((acc0 + acc4) + (acc1 + acc5)) + ((acc2 + acc6) + (acc3 + acc7))) + tail;
}

void check_conv_shapes(const Tensor& input, const Tensor& kernel,
                       const Tensor& bias, int dilation) {
  require(input.rank() == 3, "conv1d input must be B x C_in x N");
  require(kernel.rank() == 3, "conv1d kernel must be C_out x C_in x K");
  require(bias.rank() == 1, "conv1d bias must be a vector");
  require(kernel.dim(1) == input.dim(1), "conv1d channel mismatch");
  require(bias.dim(0) == kernel.dim(0), "conv1d bias size mismatch");
  require(kernel.dim(2) % 2 == 1, "conv1d kernel width must be odd");
  require(dilation >= 1, "conv1d dilation must be >= 1");
}

}  // namespace

Tensor conv1d_dilated(const Tensor& input, const Tensor& kernel,
                      const Tensor& bias, int dilation) {
  check_conv_shapes(input, kernel, bias, dilation);
  const Index batch = input.dim(0), c_in = input.dim(1), frames = input.dim(2);
  const Index c_out = kernel.dim(0), taps = kernel.dim(2);
  const Index half = taps / 2;

  Tensor output({batch, c_out, frames});
  parallel_for(batch, [&](Index b0, Index b1) {
    for (Index b = b0; b < b1; ++b) {
      for (Index o = 0; o < c_out; ++o) {
        Scalar* dst = output.row(b, o);
        const Scalar bias_o = bias[o];
        for (Index t = 0; t < frames; ++t) dst[t] = bias_o;
        for (Index i = 0; i < c_in; ++i) {
          const Scalar* src = input.row(b, i);
          for (Index j = 0; j < taps; ++j) {
            const Scalar w = kernel.at(o, i, j);
            const Index off = (j - half) * dilation;
            const Index t0 = std::max<Index>(0, -off);
            const Index t1 = std::min(frames, frames - off);
            const Scalar* shifted = src + off;
            for (Index t = t0; t < t1; ++t) dst[t] += w * shifted[t];
          }
        }
      }
    }
  });
  return output;
}

void conv1d_backward(const Tensor& input, const Tensor& kernel, int dilation,
                     const Tensor& grad_output, Tensor* grad_input,
                     Tensor* grad_kernel, Tensor* grad_bias) {
  const Index batch = input.dim(0), c_in = input.dim(1), frames = input.dim(2);
  const Index c_out = kernel.dim(0), taps = kernel.dim(2);
  const Index half = taps / 2;
  require(grad_output.rank() == 3 && grad_output.dim(0) == batch &&
              grad_output.dim(1) == c_out && grad_output.dim(2) == frames,
          "conv1d grad_output shape mismatch");

  if (grad_input) {
    *grad_input = Tensor({batch, c_in, frames});
    parallel_for(batch, [&](Index b0, Index b1) {
      for (Index b = b0; b < b1; ++b) {
        for (Index o = 0; o < c_out; ++o) {
          const Scalar* g = grad_output.row(b, o);
          for (Index i = 0; i < c_in; ++i) {
            Scalar* dst = grad_input->row(b, i);
            for (Index j = 0; j < taps; ++j) {
              const Scalar w = kernel.at(o, i, j);
              const Index off = (j - half) * dilation;
              const Index t0 = std::max<Index>(0, -off);
              const Index t1 = std::min(frames, frames - off);
              Scalar* shifted = dst + off;
              for (Index t = t0; t < t1; ++t) shifted[t] += w * g[t];
            }
          }
        }
      }
    });
  }

  if (grad_kernel) {
    *grad_kernel = Tensor({c_out, c_in, taps});
    parallel_for(c_out, [&](Index o0, Index o1) {
      for (Index o = o0; o < o1; ++o) {
        for (Index b = 0; b < batch; ++b) {
          const Scalar* g = grad_output.row(b, o);
          for (Index i = 0; i < c_in; ++i) {
            const Scalar* src = input.row(b, i);
            for (Index j = 0; j < taps; ++j) {
              const Index off = (j - half) * dilation;
              const Index t0 = std::max<Index>(0, -off);
              const Index t1 = std::min(frames, frames - off);
              grad_kernel->at(o, i, j) += dot_fixed(g + t0, src + off + t0, t1 - t0);
            }
          }
        }
      }
    });
  }

  if (grad_bias) {
    *grad_bias = Tensor({c_out});
    parallel_for(c_out, [&](Index o0, Index o1) {
      for (Index o = o0; o < o1; ++o) {
        Scalar sum = 0;
        for (Index b = 0; b < batch; ++b) {
          const Scalar* g = grad_output.row(b, o);
          for (Index t = 0; t < frames; ++t) sum += g[t];
        }
        (*grad_bias)[o] = sum;
      }
    });
  }
}

namespace {

void check_bn_shapes(const Tensor& input, const Tensor& gamma,
                     const Tensor& beta) {
  require(input.rank() == 3, "batchnorm input must be B x C x N");
  const Index channels = input.dim(1);
  require(gamma.rank() == 1 && gamma.dim(0) == channels,
          "batchnorm gamma size mismatch");
  require(beta.rank() == 1 && beta.dim(0) == channels,
          "batchnorm beta size mismatch");
}

}  // namespace

Tensor batchnorm1d_train(const Tensor& input, const Tensor& gamma,
                         const Tensor& beta, Tensor& running_mean,
                         Tensor& running_var, Scalar momentum, Scalar eps,
                         BatchNormCache* cache) {
  check_bn_shapes(input, gamma, beta);
  require(running_mean.rank() == 1 && running_mean.dim(0) == input.dim(1) &&
              running_var.rank() == 1 && running_var.dim(0) == input.dim(1),
          "batchnorm running stats size mismatch");
  const Index batch = input.dim(0), channels = input.dim(1), frames = input.dim(2);
  const Index m = batch * frames;
  require(m >= 2, "batchnorm needs at least two values per channel");

  Tensor output({batch, channels, frames});
  Tensor xhat({batch, channels, frames});
  ArrayX inv_std(channels);
  ArrayX mean(channels), var(channels);

  parallel_for(channels, [&](Index c0, Index c1) {
    for (Index c = c0; c < c1; ++c) {
      Scalar sum = 0;
      for (Index b = 0; b < batch; ++b) {
        const Scalar* src = input.row(b, c);
        for (Index t = 0; t < frames; ++t) sum += src[t];
      }
      const Scalar mu = sum / static_cast<Scalar>(m);
      Scalar sq = 0;
      for (Index b = 0; b < batch; ++b) {
        const Scalar* src = input.row(b, c);
        for (Index t = 0; t < frames; ++t) {
          const Scalar d = src[t] - mu;
          sq += d * d;
        }
      }
      const Scalar v = sq / static_cast<Scalar>(m);
      const Scalar istd = Scalar(1) / std::sqrt(v + eps);
      mean[c] = mu;
      var[c] = v;
      inv_std[c] = istd;
      const Scalar g = gamma[c], be = beta[c];
      for (Index b = 0; b < batch; ++b) {
        const Scalar* src = input.row(b, c);
        Scalar* xh = xhat.row(b, c);
        Scalar* dst = output.row(b, c);
        for (Index t = 0; t < frames; ++t) {
          xh[t] = (src[t] - mu) * istd;
          dst[t] = g * xh[t] + be;
        }
      }
    }
  });

  const Scalar unbias = static_cast<Scalar>(m) / static_cast<Scalar>(m - 1);
  for (Index c = 0; c < channels; ++c) {
    running_mean[c] = (Scalar(1) - momentum) * running_mean[c] + momentum * mean[c];
    running_var[c] =
        (Scalar(1) - momentum) * running_var[c] + momentum * var[c] * unbias;
  }

  if (cache) {
    cache->xhat = std::move(xhat);
    cache->inv_std = std::move(inv_std);
  }
  return output;
}

Tensor batchnorm1d_eval(const Tensor& input, const Tensor& gamma,
                        const Tensor& beta, const Tensor& running_mean,
                        const Tensor& running_var, Scalar eps) {
  check_bn_shapes(input, gamma, beta);
  const Index batch = input.dim(0), channels = input.dim(1), frames = input.dim(2);
  Tensor output({batch, channels, frames});
  parallel_for(channels, [&](Index c0, Index c1) {
    for (Index c = c0; c < c1; ++c) {
      const Scalar istd = Scalar(1) / std::sqrt(running_var[c] + eps);
      const Scalar mu = running_mean[c], g = gamma[c], be = beta[c];
      for (Index b = 0; b < batch; ++b) {
        const Scalar* src = input.row(b, c);
        Scalar* dst = output.row(b, c);
        for (Index t = 0; t < frames; ++t) dst[t] = g * (src[t] - mu) * istd + be;
      }
    }
  });
  return output;
}

void batchnorm1d_backward(const BatchNormCache& cache, const Tensor& gamma,
                          const Tensor& grad_output, Tensor* grad_input,
                          Tensor* grad_gamma, Tensor* grad_beta) {
  const Tensor& xhat = cache.xhat;
  require(grad_output.same_shape(xhat), "batchnorm grad_output shape mismatch");
  const Index batch = xhat.dim(0), channels = xhat.dim(1), frames = xhat.dim(2);
  const Scalar m = static_cast<Scalar>(batch * frames);

  if (grad_input) *grad_input = Tensor({batch, channels, frames});
  if (grad_gamma) *grad_gamma = Tensor({channels});
  if (grad_beta) *grad_beta = Tensor({channels});

  parallel_for(channels, [&](Index c0, Index c1) {
    for (Index c = c0; c < c1; ++c) {
      Scalar g_sum = 0, gx_sum = 0;
      for (Index b = 0; b < batch; ++b) {
        const Scalar* g = grad_output.row(b, c);
        const Scalar* xh = xhat.row(b, c);
        for (Index t = 0; t < frames; ++t) {
          g_sum += g[t];
          gx_sum += g[t] * xh[t];
        }
      }
      if (grad_gamma) (*grad_gamma)[c] = gx_sum;
      if (grad_beta) (*grad_beta)[c] = g_sum;
      if (grad_input) {
        const Scalar scale = gamma[c] * cache.inv_std[c];
        const Scalar mean_g = g_sum / m;
        const Scalar mean_gx = gx_sum / m;
        for (Index b = 0; b < batch; ++b) {
          const Scalar* g = grad_output.row(b, c);
          const Scalar* xh = xhat.row(b, c);
          Scalar* dst = grad_input->row(b, c);
          for (Index t = 0; t < frames; ++t) {
            dst[t] = scale * (g[t] - mean_g - xh[t] * mean_gx);
          }
        }
      }
    }
  });
}

Tensor linear_forward(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  require(x.rank() == 2, "linear input must be B x F");
  require(weight.rank() == 2 && weight.dim(1) == x.dim(1),
          "linear weight must be H x F");
  require(bias.rank() == 1 && bias.dim(0) == weight.dim(0),
          "linear bias size mismatch");
  Tensor y({x.dim(0), weight.dim(0)});
  y.matrix().noalias() = x.matrix() * weight.matrix().transpose();
  y.matrix().rowwise() += bias.array().matrix().transpose();
  return y;
}

void linear_backward(const Tensor& x, const Tensor& weight,
                     const Tensor& grad_output, Tensor* grad_x,
                     Tensor* grad_weight, Tensor* grad_bias) {
  require(grad_output.rank() == 2 && grad_output.dim(0) == x.dim(0) &&
              grad_output.dim(1) == weight.dim(0),
          "linear grad_output shape mismatch");
  if (grad_x) {
    *grad_x = Tensor({x.dim(0), x.dim(1)});
    grad_x->matrix().noalias() = grad_output.matrix() * weight.matrix();
  }
  if (grad_weight) {
    *grad_weight = Tensor({weight.dim(0), weight.dim(1)});
    grad_weight->matrix().noalias() = grad_output.matrix().transpose() * x.matrix();
  }
  if (grad_bias) {
    *grad_bias = Tensor({weight.dim(0)});
    grad_bias->array() = grad_output.matrix().colwise().sum().transpose().array();
  }
}

Tensor relu(const Tensor& x) {
  Tensor y = x;
  y.array() = y.array().max(Scalar(0));
  return y;
}

Tensor sigmoid(const Tensor& x) {
  Tensor y = x;
  y.array() = y.array().unaryExpr([](Scalar v) {
    if (v >= 0) {
      return Scalar(1) / (Scalar(1) + std::exp(-v));
    }
    const Scalar e = std::exp(v);
    return e / (Scalar(1) + e);
  });
  return y;
}

Tensor softmax_rows(const Tensor& logits) {
  require(logits.rank() == 2, "softmax input must be B x C");
  Tensor probs = logits;
  auto mat = probs.matrix();
  for (Index r = 0; r < mat.rows(); ++r) {
    auto row = mat.row(r);
    const Scalar peak = row.maxCoeff();
    row = (row.array() - peak).exp();
    row /= row.sum();
  }
  return probs;
}

Tensor global_avg_pool(const Tensor& x) {
  require(x.rank() == 3, "global_avg_pool input must be B x C x N");
  const Index batch = x.dim(0), channels = x.dim(1), frames = x.dim(2);
  require(frames > 0, "global_avg_pool over empty time axis");
  Tensor y({batch, channels});
  for (Index b = 0; b < batch; ++b) {
    for (Index c = 0; c < channels; ++c) {
      const Scalar* src = x.row(b, c);
      Scalar sum = 0;
      for (Index t = 0; t < frames; ++t) sum += src[t];
      y.at(b, c) = sum / static_cast<Scalar>(frames);
    }
  }
  return y;
}

}  // namespace pitchstats::nn
