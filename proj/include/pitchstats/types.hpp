#pragma once

#include <Eigen/Core>

namespace pitchstats {

// All public numerics are 64-bit.
using Scalar = double;
using Index = Eigen::Index;

using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

// Row-major dense matrices; rows are frames or batch entries throughout.
using MatrixX3R = Eigen::Matrix<Scalar, Eigen::Dynamic, 3, Eigen::RowMajor>;
using MatrixXR = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace pitchstats
