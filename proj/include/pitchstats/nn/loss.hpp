#pragma once

#include <vector>

#include "pitchstats/nn/tape.hpp"
#include "pitchstats/nn/tensor.hpp"

namespace pitchstats::nn {

// Class-balanced focal loss over per-row class distributions:
//
//   L = mean_b  -alpha[y_b] * (1 - p_b)^gamma * log(p_b),   p_b = probs[b, y_b]
//
// with p_b clamped to [clamp, 1-clamp] before the log. gamma = 0 and uniform
// alpha = 1 reduce it to cross-entropy exactly.
struct FocalLossParams {
  Scalar gamma = 2.0;
  std::vector<Scalar> alpha;  // one weight per class, each in (0, 1]
  Scalar clamp = 1e-12;

  void validate(Index n_classes) const;
};

// Per-class weights proportional to inverse class frequency, scaled so the
// largest weight is 1. Every class must appear at least once.
std::vector<Scalar> balanced_alpha(const std::vector<int>& labels, int n_classes);

// Uniform weights of 1; with gamma = 0 this is plain cross-entropy.
std::vector<Scalar> uniform_alpha(int n_classes);

// Loss value without a tape (shared by the tape op and by tests).
Scalar focal_loss_value(const Tensor& probs, const std::vector<int>& targets,
                        const FocalLossParams& params);

// Tape op: probs is a B x C node of row distributions (rows must sum to 1
// within 1e-6); returns a scalar node holding the mean loss.
NodeId focal_loss(Tape& tape, NodeId probs, const std::vector<int>& targets,
                  const FocalLossParams& params);

}  // namespace pitchstats::nn
