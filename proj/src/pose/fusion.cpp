#include "pitchstats/pose/fusion.hpp"

#include <cmath>
#include <string>

#include "pitchstats/error.hpp"

namespace pitchstats::pose {

void FusionInputs::validate() const {
  if (j3d.rows() < 1) throw ValidationError("fusion needs at least one joint");
  if (regressor.rows() != j3d.rows()) {
    throw ValidationError("regressor has " + std::to_string(regressor.rows()) +
                          " rows for " + std::to_string(j3d.rows()) + " joints");
  }
  if (regressor.cols() != vertices.rows()) {
    throw ValidationError("regressor has " + std::to_string(regressor.cols()) +
                          " columns for " + std::to_string(vertices.rows()) +
                          " vertices");
  }
  if (!(w1 >= 0) || !(w2 >= 0)) {
    throw ValidationError("fusion weights must be non-negative");
  }
  if (!j3d.allFinite() || !vertices.allFinite() || !regressor.allFinite()) {
    throw ValidationError("fusion inputs must be finite");
  }
  for (Index r = 0; r < regressor.rows(); ++r) {
    const Scalar sum = regressor.row(r).sum();
    if (std::abs(sum - Scalar(1)) > 1e-6) {
      throw ValidationError("regressor row " + std::to_string(r) +
                            " sums to " + std::to_string(sum) + ", expected 1");
    }
  }
}

MatrixX3R fuse_joints(const FusionInputs& inputs) {
  inputs.validate();
  MatrixX3R regressed = inputs.regressor * inputs.vertices;
  return inputs.w1 * inputs.j3d + inputs.w2 * regressed;
}

}  // namespace pitchstats::pose
