// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "kbgen/errors.hpp"

namespace kbgen::numkit {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

inline std::string shape_string(Index rows, Index cols) {
  return "(" + std::to_string(rows) + "x" + std::to_string(cols) + ")";
}

template <typename Derived>
std::string shape_of(const Eigen::MatrixBase<Derived>& m) {
  return shape_string(m.rows(), m.cols());
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

/// Dense row-major tensor of arbitrary rank. Used at storage boundaries
/// (checkpoints, fixtures); the math itself works on Eigen matrices.
template <typename Scalar>
class Tensor {
 public:
  Tensor() = default;

  Tensor(std::vector<std::size_t> shape, std::vector<Scalar> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    const std::size_t expected =
        std::accumulate(shape_.begin(), shape_.end(), std::size_t{1}, std::multiplies<>());
    if (expected != data_.size()) {
      throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                       " does not match shape product " + std::to_string(expected));
    }
    for (Scalar x : data_) {
      if (!std::isfinite(static_cast<double>(x))) throw NumericError("tensor contains NaN or Inf");
    }
  }

  template <typename Derived>
  static Tensor from_matrix(const Eigen::MatrixBase<Derived>& m) {
    std::vector<Scalar> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Index r = 0; r < m.rows(); ++r)
      for (Index c = 0; c < m.cols(); ++c) data.push_back(static_cast<Scalar>(m(r, c)));
    return Tensor({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())},
                  std::move(data));
  }

  Matrix<Scalar> to_matrix() const {
    if (shape_.size() > 2) throw ShapeError("tensor of rank " + std::to_string(rank()) + " is not a matrix");
    const Index rows = shape_.empty() ? 1 : static_cast<Index>(shape_[0]);
    const Index cols = shape_.size() < 2 ? 1 : static_cast<Index>(shape_[1]);
    Matrix<Scalar> m(rows, cols);
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) m(r, c) = data_[static_cast<std::size_t>(r * cols + c)];
    return m;
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  const std::vector<Scalar>& data() const { return data_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }

 private:
  std::vector<std::size_t> shape_;
  std::vector<Scalar> data_;
};

}  // namespace kbgen::numkit
