#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pitchstats/error.hpp"
#include "pitchstats/types.hpp"

namespace pitchstats::nn {

// Dense n-d array of Scalar with row-major (last index fastest) layout.
// Rank is small and dynamic: vectors (bias), matrices (FC weights,
// batch × class probabilities), and 3-d stacks (batch × channel × time,
// out-channel × in-channel × tap) cover every tensor in the network.
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<Index> shape) : shape_(std::move(shape)) {
    data_.setZero(count(shape_));
  }

  Tensor(std::initializer_list<Index> shape)
      : Tensor(std::vector<Index>(shape)) {}

  static Tensor zeros(std::vector<Index> shape) { return Tensor(std::move(shape)); }

  static Tensor full(std::vector<Index> shape, Scalar value) {
    Tensor t(std::move(shape));
    t.data_.setConstant(value);
    return t;
  }

  static Tensor from_array(std::vector<Index> shape, ArrayX values) {
    if (values.size() != count(shape)) {
      throw ValidationError("tensor data size does not match shape");
    }
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = std::move(values);
    return t;
  }

  const std::vector<Index>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  Index dim(int axis) const { return shape_.at(static_cast<std::size_t>(axis)); }
  Index size() const { return data_.size(); }
  bool empty() const { return data_.size() == 0; }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  ArrayX& array() { return data_; }
  const ArrayX& array() const { return data_; }
  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }

  Scalar& operator[](Index i) { return data_[i]; }
  Scalar operator[](Index i) const { return data_[i]; }

  Scalar& at(Index i) { return data_[check(i, 1)]; }
  Scalar at(Index i) const { return data_[check(i, 1)]; }
  Scalar& at(Index i, Index j) { return data_[offset2(i, j)]; }
  Scalar at(Index i, Index j) const { return data_[offset2(i, j)]; }
  Scalar& at(Index i, Index j, Index k) { return data_[offset3(i, j, k)]; }
  Scalar at(Index i, Index j, Index k) const { return data_[offset3(i, j, k)]; }

  // Matrix view of a rank-2 tensor (rows = dim 0).
  Eigen::Map<MatrixXR> matrix() {
    require_rank(2);
    return {data_.data(), shape_[0], shape_[1]};
  }
  Eigen::Map<const MatrixXR> matrix() const {
    require_rank(2);
    return {data_.data(), shape_[0], shape_[1]};
  }

  // Contiguous row (i, j, :) of a rank-3 tensor.
  Scalar* row(Index i, Index j) { return data_.data() + (i * shape_[1] + j) * shape_[2]; }
  const Scalar* row(Index i, Index j) const {
    return data_.data() + (i * shape_[1] + j) * shape_[2];
  }

  std::string shape_string() const {
    std::string out = "(";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
      if (i) out += ", ";
      out += std::to_string(shape_[i]);
    }
    return out + ")";
  }

 private:
  static Index count(const std::vector<Index>& shape) {
    Index n = 1;
    for (Index d : shape) {
      if (d < 0) throw ValidationError("negative tensor dimension");
      n *= d;
    }
    return n;
  }

  void require_rank(int r) const {
    if (rank() != r) {
      throw ValidationError("tensor rank " + std::to_string(rank()) +
                            " where rank " + std::to_string(r) + " is required");
    }
  }

  Index check(Index i, int r) const {
    require_rank(r);
    return i;
  }

  Index offset2(Index i, Index j) const {
    require_rank(2);
    return i * shape_[1] + j;
  }

  Index offset3(Index i, Index j, Index k) const {
    require_rank(3);
    return (i * shape_[1] + j) * shape_[2] + k;
  }

  std::vector<Index> shape_;
  ArrayX data_;
};

}  // namespace pitchstats::nn
