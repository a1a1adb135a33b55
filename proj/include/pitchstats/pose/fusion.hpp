#pragma once

#include "pitchstats/types.hpp"

namespace pitchstats::pose {

// Inputs to the two-source joint estimate
//
//   fused = w1 * j3d + w2 * (regressor * vertices)
//
// where `regressor` maps M mesh vertices to K joints; each of its rows is a
// convex combination (sums to 1 within 1e-6).
struct FusionInputs {
  MatrixX3R j3d;       // K x 3 directly estimated joints
  MatrixX3R vertices;  // M x 3 mesh vertices
  MatrixXR regressor;  // K x M
  Scalar w1 = 0.5;
  Scalar w2 = 0.5;

  void validate() const;
};

// Weighted fusion of direct and vertex-regressed joints; output is K x 3.
MatrixX3R fuse_joints(const FusionInputs& inputs);

}  // namespace pitchstats::pose
