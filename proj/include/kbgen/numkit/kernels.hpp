// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <optional>
#include <vector>

#include "kbgen/numkit/dense.hpp"

namespace kbgen::numkit {

template <std::floating_point Scalar>
Scalar sigmoid(Scalar x) {
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

template <typename Derived>
auto sigmoid(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  return m.unaryExpr([](Scalar x) { return sigmoid(x); }).eval();
}

/// Numerically stable softmax of a vector. Masked-out entries (mask false)
/// receive exactly zero probability.
template <typename Derived>
Vector<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived>& logits,
                                         const std::vector<bool>* mask = nullptr) {
  using Scalar = typename Derived::Scalar;
  const Index n = logits.size();
  if (n == 0) throw NumericError("degenerate softmax: empty input");
  if (mask && static_cast<Index>(mask->size()) != n)
    throw ShapeError("softmax mask length " + std::to_string(mask->size()) + " differs from logits " +
                     std::to_string(n));
  Scalar mx = -std::numeric_limits<Scalar>::infinity();
  bool any = false;
  for (Index i = 0; i < n; ++i) {
    if (mask && !(*mask)[static_cast<std::size_t>(i)]) continue;
    mx = std::max(mx, logits(i));
    any = true;
  }
  if (!any) throw NumericError("degenerate softmax: mask excludes every entry");
  Vector<Scalar> out(n);
  Scalar total = 0;
  for (Index i = 0; i < n; ++i) {
    if (mask && !(*mask)[static_cast<std::size_t>(i)]) {
      out(i) = 0;
      continue;
    }
    out(i) = std::exp(logits(i) - mx);
    total += out(i);
  }
  out /= total;
  return out;
}

/// Read-only view of one GRU's gate parameters. Biases are column vectors.
template <typename Scalar>
struct GruWeights {
  const Matrix<Scalar>& W_z;
  const Matrix<Scalar>& U_z;
  const Matrix<Scalar>& b_z;
  const Matrix<Scalar>& W_r;
  const Matrix<Scalar>& U_r;
  const Matrix<Scalar>& b_r;
  const Matrix<Scalar>& W_n;
  const Matrix<Scalar>& U_n;
  const Matrix<Scalar>& b_n;

  Index input_size() const { return W_z.cols(); }
  Index hidden_size() const { return U_z.rows(); }

  void check(Index x_rows, Index h_rows) const {
    const Index hidden = hidden_size();
    auto expect = [](const Matrix<Scalar>& m, Index r, Index c, const char* what) {
      if (m.rows() != r || m.cols() != c)
        throw ShapeError(std::string("gru ") + what + " has shape " + shape_of(m) + ", expected " +
                         shape_string(r, c));
    };
    if (x_rows != input_size())
      throw ShapeError("gru input " + shape_string(x_rows, 1) + " incompatible with W_z " + shape_of(W_z));
    if (h_rows != hidden)
      throw ShapeError("gru hidden " + shape_string(h_rows, 1) + " incompatible with U_z " + shape_of(U_z));
    expect(U_z, hidden, hidden, "U_z");
    expect(W_r, hidden, x_rows, "W_r");
    expect(U_r, hidden, hidden, "U_r");
    expect(W_n, hidden, x_rows, "W_n");
    expect(U_n, hidden, hidden, "U_n");
    expect(b_z, hidden, 1, "b_z");
    expect(b_r, hidden, 1, "b_r");
    expect(b_n, hidden, 1, "b_n");
  }
};

/// One GRU step:
///   z = sigma(W_z x + U_z h + b_z)
///   r = sigma(W_r x + U_r h + b_r)
///   n = tanh(W_n x + U_n (r * h) + b_n)
///   h' = z * h + (1 - z) * n
template <typename Scalar>
Vector<Scalar> gru_cell(const Vector<Scalar>& x, const Vector<Scalar>& h, const GruWeights<Scalar>& w) {
  w.check(x.rows(), h.rows());
  const Vector<Scalar> z = sigmoid((w.W_z * x + w.U_z * h + w.b_z).eval());
  const Vector<Scalar> r = sigmoid((w.W_r * x + w.U_r * h + w.b_r).eval());
  const Vector<Scalar> n = (w.W_n * x + w.U_n * r.cwiseProduct(h) + w.b_n).array().tanh().matrix();
  return (z.array() * h.array() + (Scalar(1) - z.array()) * n.array()).matrix();
}

}  // namespace kbgen::numkit
