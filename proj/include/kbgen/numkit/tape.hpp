// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <functional>
#include <initializer_list>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "kbgen/numkit/dense.hpp"
#include "kbgen/numkit/kernels.hpp"
#include "kbgen/numkit/params.hpp"

namespace kbgen::numkit {

template <typename Scalar>
class Tape;

/// Handle to a node on a Tape.
template <typename Scalar>
struct Var {
  Tape<Scalar>* tape = nullptr;
  int id = -1;

  const Matrix<Scalar>& value() const { return tape->value(*this); }
  Index rows() const { return value().rows(); }
  Index cols() const { return value().cols(); }
  bool valid() const { return tape != nullptr && id >= 0; }
};

/// Reverse-mode autodiff record. Nodes are appended in evaluation order, so
/// the node vector is always topologically sorted. One tape per forward pass;
/// not thread-safe.
template <typename Scalar>
class Tape {
 public:
  using Mat = Matrix<Scalar>;
  using Pullback = std::function<void(Tape&, const Mat&)>;

  explicit Tape(const ParamStore<Scalar>* params = nullptr) : params_(params) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  const ParamStore<Scalar>* params() const { return params_; }

  Var<Scalar> constant(Mat value) {
    if (!value.allFinite()) throw NumericError("constant contains NaN or Inf");
    Node n;
    n.value = std::move(value);
    return append(std::move(n));
  }

  /// Leaf referencing a stored parameter without copying it.
  Var<Scalar> param(ParamId id) {
    require_params();
    Node n;
    n.ref = &(*params_)[id];
    n.param = id;
    n.requires_grad = true;
    return append(std::move(n));
  }

  /// Gathers rows of a parameter table as columns: result is (cols x k) with
  /// column j equal to table.row(rows[j]), or zero when rows[j] is -1. The
  /// backward pass scatters straight into the table gradient.
  Var<Scalar> param_rows(ParamId id, std::span<const Index> rows) {
    require_params();
    const Mat& table = (*params_)[id];
    Mat out(table.cols(), static_cast<Index>(rows.size()));
    std::vector<Index> idx(rows.begin(), rows.end());
    for (Index j = 0; j < out.cols(); ++j) {
      const Index r = idx[static_cast<std::size_t>(j)];
      if (r == -1) {
        out.col(j).setZero();
        continue;
      }
      if (r < 0 || r >= table.rows())
        throw ShapeError("row " + std::to_string(r) + " outside table '" + params_->name(id) + "' " +
                         shape_of(table));
      out.col(j) = table.row(r).transpose();
    }
    Node n;
    n.value = std::move(out);
    n.requires_grad = true;
    n.pullback = [id, idx = std::move(idx)](Tape& t, const Mat& g) {
      Mat& dst = t.param_grad(id);
      for (Index j = 0; j < g.cols(); ++j) {
        const Index r = idx[static_cast<std::size_t>(j)];
        if (r >= 0) dst.row(r) += g.col(j).transpose();
      }
    };
    return append(std::move(n));
  }

  const Mat& value(Var<Scalar> v) const {
    const Node& n = nodes_[static_cast<std::size_t>(v.id)];
    return n.ref ? *n.ref : n.value;
  }

  bool requires_grad(int id) const { return nodes_[static_cast<std::size_t>(id)].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  /// Records a computed node. The pullback receives dLoss/dOutput and must
  /// call accumulate() for each input that requires a gradient.
  Var<Scalar> record(Mat value, std::initializer_list<Var<Scalar>> inputs, Pullback pullback) {
    return record(std::move(value), std::span<const Var<Scalar>>(inputs.begin(), inputs.size()), std::move(pullback));
  }

  Var<Scalar> record(Mat value, std::span<const Var<Scalar>> inputs, Pullback pullback) {
    if (!value.allFinite()) throw NumericError("non-finite value produced on tape");
    Node n;
    n.value = std::move(value);
    for (const auto& in : inputs) n.requires_grad = n.requires_grad || requires_grad(in.id);
    if (n.requires_grad) n.pullback = std::move(pullback);
    return append(std::move(n));
  }

  template <typename Derived>
  void accumulate(Var<Scalar> v, const Eigen::MatrixBase<Derived>& g) {
    Node& n = nodes_[static_cast<std::size_t>(v.id)];
    if (!n.requires_grad) return;
    if (n.param >= 0) {
      param_grad(n.param).noalias() += g;
      return;
    }
    Mat& slot = grads_[static_cast<std::size_t>(v.id)];
    if (slot.size() == 0)
      slot = g;
    else
      slot.noalias() += g;
  }

  /// Gradients of a scalar (1x1) node with respect to every parameter of the
  /// store. Parameters the loss does not touch get zero gradients.
  GradientSet<Scalar> backward(Var<Scalar> loss) {
    GradientSet<Scalar> out(*params_checked());
    backward_into(loss, out, Scalar(1));
    return out;
  }

  /// Adds scale * dLoss/dParams into an existing gradient set.
  void backward_into(Var<Scalar> loss, GradientSet<Scalar>& out, Scalar scale) {
    params_checked();
    const Mat& lv = value(loss);
    if (lv.rows() != 1 || lv.cols() != 1)
      throw ShapeError("backward requires a scalar loss, got " + shape_of(lv));
    if (out.size() != params_->size()) throw ShapeError("gradient set does not match parameter store");
    target_ = &out;
    grads_.assign(nodes_.size(), Mat());
    accumulate(loss, Mat::Constant(1, 1, scale).eval());
    for (int i = loss.id; i >= 0; --i) {
      Node& n = nodes_[static_cast<std::size_t>(i)];
      Mat& g = grads_[static_cast<std::size_t>(i)];
      if (!n.requires_grad || !n.pullback || g.size() == 0) continue;
      n.pullback(*this, g);
      g.resize(0, 0);
    }
    target_ = nullptr;
    grads_.clear();
  }

  Mat& param_grad(ParamId id) { return (*target_)[id]; }

 private:
  struct Node {
    Mat value;
    const Mat* ref = nullptr;
    ParamId param = -1;
    bool requires_grad = false;
    Pullback pullback;
  };

  Var<Scalar> append(Node n) {
    nodes_.push_back(std::move(n));
    return Var<Scalar>{this, static_cast<int>(nodes_.size() - 1)};
  }

  void require_params() const {
    if (!params_) throw ShapeError("tape has no parameter store");
  }
  const ParamStore<Scalar>* params_checked() const {
    require_params();
    return params_;
  }

  const ParamStore<Scalar>* params_;
  std::vector<Node> nodes_;
  std::vector<Mat> grads_;
  GradientSet<Scalar>* target_ = nullptr;
};

// ---------------------------------------------------------------------------
// Primitive operations. Each records one node with its local pullback.

namespace detail {
template <typename Scalar>
void same_shape(const Var<Scalar>& a, const Var<Scalar>& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError(std::string(op) + ": shapes " + shape_string(a.rows(), a.cols()) + " and " +
                     shape_string(b.rows(), b.cols()) + " differ");
}
}  // namespace detail

template <typename Scalar>
Var<Scalar> matmul(Var<Scalar> a, Var<Scalar> b) {
  if (a.cols() != b.rows())
    throw ShapeError("matmul: " + shape_string(a.rows(), a.cols()) + " x " + shape_string(b.rows(), b.cols()));
  Matrix<Scalar> out = a.value() * b.value();
  return a.tape->record(std::move(out), {a, b}, [a, b](Tape<Scalar>& t, const Matrix<Scalar>& g) {
    if (t.requires_grad(a.id)) t.accumulate(a, g * t.value(b).transpose());
    if (t.requires_grad(b.id)) t.accumulate(b, t.value(a).transpose() * g);
  });
}

template <typename Scalar>
Var<Scalar> add(Var<Scalar> a, Var<Scalar> b) {
  detail::same_shape(a, b, "add");
  return a.tape->record(a.value() + b.value(), {a, b}, [a, b](Tape<Scalar>& t, const Matrix<Scalar>& g) {
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

template <typename Scalar>
Var<Scalar> sub(Var<Scalar> a, Var<Scalar> b) {
  detail::same_shape(a, b, "sub");
  return a.tape->record(a.value() - b.value(), {a, b}, [a, b](Tape<Scalar>& t, const Matrix<Scalar>& g) {
    t.accumulate(a, g);
    t.accumulate(b, -g);
  });
}

/// a (m x n) plus column vector c (m x 1) broadcast across columns.
template <typename Scalar>
Var<Scalar> add_col(Var<Scalar> a, Var<Scalar> c) {
  if (c.cols() != 1 || c.rows() != a.rows())
    throw ShapeError("add_col: " + shape_string(a.rows(), a.cols()) + " with " + shape_string(c.rows(), c.cols()));
  Matrix<Scalar> out = a.value().colwise() + c.value().col(0);
  return a.tape->record(std::move(out), {a, c}, [a, c](Tape<Scalar>& t, const Matrix<Scalar>& g) {
    t.accumulate(a, g);
    if (t.requires_grad(c.id)) t.accumulate(c, g.rowwise().sum());
  });
}

/// Elementwise product.
template <typename Scalar>
Var<Scalar> mul(Var<Scalar> a, Var<Scalar> b) {
  detail::same_shape(a, b, "mul");
  return a.tape->record(a.value().cwiseProduct(b.value()), {a, b}, [a, b](Tape<Scalar>& t, const Matrix<Scalar>& g) {
    if (t.requires_grad(a.id)) t.accumulate(a, g.cwiseProduct(t.value(b)));
    if (t.requires_grad(b.id)) t.accumulate(b, g.cwiseProduct(t.value(a)));
  });
}

template <typename Scalar>
Var<Scalar> scale(Var<Scalar> a, Scalar s) {
  return a.tape->record(a.value() * s, {a}, [a, s](Tape<Scalar>& t, const Matrix<Scalar>& g) { t.accumulate(a, g * s); });
}

/// 1 - a, elementwise.
template <typename Scalar>
Var<Scalar> one_minus(Var<Scalar> a) {
  Matrix<Scalar> out = (Scalar(1) - a.value().array()).matrix();
  return a.tape->record(std::move(out), {a}, [a](Tape<Scalar>& t, const Matrix<Scalar>& g) { t.accumulate(a, -g); });
}

template <typename Scalar>
Var<Scalar> tanh(Var<Scalar> a) {
  Matrix<Scalar> out = a.value().array().tanh().matrix();
  Matrix<Scalar> y = out;
  return a.tape->record(std::move(out), {a}, [a, y = std::move(y)](Tape<Scalar>& t, const Matrix<Scalar>& g) {
    t.accumulate(a, (g.array() * (Scalar(1) - y.array().square())).matrix());
  });
}

template <typename Scalar>
Var<Scalar> sigmoid(Var<Scalar> a) {
  Matrix<Scalar> out = numkit::sigmoid(a.value());
  Matrix<Scalar> y = out;
  return a.tape->record(std::move(out), {a}, [a, y = std::move(y)](Tape<Scalar>& t, const Matrix<Scalar>& g) {
    t.accumulate(a, (g.array() * y.array() * (Scalar(1) - y.array())).matrix());
  });
}

template <typename Scalar>
Var<Scalar> log(Var<Scalar> a) {
  if ((a.value().array() <= Scalar(0)).any()) throw NumericError("log of non-positive value");
  Matrix<Scalar> out = a.value().array().log().matrix();
  return a.tape->record(std::move(out), {a}, [a](Tape<Scalar>& t, const Matrix<Scalar>& g) {
    t.accumulate(a, (g.array() / t.value(a).array()).matrix());
  });
}

/// Elementwise minimum. At ties the gradient goes to the first argument.
template <typename Scalar>
Var<Scalar> min(Var<Scalar> a, Var<Scalar> b) {
  detail::same_shape(a, b, "min");
  Matrix<Scalar> out = a.value().cwiseMin(b.value());
  return a.tape->record(std::move(out), {a, b}, [a, b](Tape<Scalar>& t, const Matrix<Scalar>& g) {
    const auto first = (t.value(a).array() <= t.value(b).array());
    if (t.requires_grad(a.id)) t.accumulate(a, first.select(g.array(), Scalar(0)).matrix());
    if (t.requires_grad(b.id)) t.accumulate(b, first.select(Scalar(0), g.array()).matrix());
  });
}

/// Sum of all entries, as a 1x1 node.
template <typename Scalar>
Var<Scalar> sum(Var<Scalar> a) {
  Matrix<Scalar> out = Matrix<Scalar>::Constant(1, 1, a.value().sum());
  const Index r = a.rows(), c = a.cols();
  return a.tape->record(std::move(out), {a}, [a, r, c](Tape<Scalar>& t, const Matrix<Scalar>& g) {
    t.accumulate(a, Matrix<Scalar>::Constant(r, c, g(0, 0)));
  });
}

template <typename Scalar>
Var<Scalar> transpose(Var<Scalar> a) {
  return a.tape->record(a.value().transpose(), {a}, [a](Tape<Scalar>& t, const Matrix<Scalar>& g) {
    t.accumulate(a, g.transpose());
  });
}

/// Column-wise softmax: every column of the result is a probability vector.
/// Rows with mask[row] == false get exactly zero mass in every column.
template <typename Scalar>
Var<Scalar> softmax_cols(Var<Scalar> a, const std::vector<bool>* mask = nullptr) {
  Matrix<Scalar> out(a.rows(), a.cols());
  for (Index j = 0; j < a.cols(); ++j) out.col(j) = numkit::softmax(a.value().col(j), mask);
  Matrix<Scalar> probs = out;
  return a.tape->record(std::move(out), {a}, [a, p = std::move(probs)](Tape<Scalar>& t, const Matrix<Scalar>& g) {
    // dL/dz = p * (g - <p, g>) per column
    const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> dots = p.cwiseProduct(g).colwise().sum();
    Matrix<Scalar> dz = p.cwiseProduct(g - dots.replicate(p.rows(), 1));
    t.accumulate(a, dz);
  });
}

/// Vertical concatenation (stacks rows). All parts share the column count.
template <typename Scalar>
Var<Scalar> concat_rows(const std::vector<Var<Scalar>>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  const Index cols = parts.front().cols();
  Index rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols) throw ShapeError("concat_rows: column counts differ");
    rows += p.rows();
  }
  Matrix<Scalar> out(rows, cols);
  Index offset = 0;
  std::vector<std::pair<Var<Scalar>, Index>> spans;
  for (const auto& p : parts) {
    out.middleRows(offset, p.rows()) = p.value();
    spans.emplace_back(p, offset);
    offset += p.rows();
  }
  return parts.front().tape->record(std::move(out), std::span<const Var<Scalar>>(parts),
                                    [spans](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                                      for (const auto& [v, off] : spans)
                                        if (t.requires_grad(v.id)) t.accumulate(v, g.middleRows(off, v.rows()));
                                    });
}

/// Horizontal concatenation (appends columns).
template <typename Scalar>
Var<Scalar> concat_cols(const std::vector<Var<Scalar>>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  const Index rows = parts.front().rows();
  Index cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) throw ShapeError("concat_cols: row counts differ");
    cols += p.cols();
  }
  Matrix<Scalar> out(rows, cols);
  Index offset = 0;
  std::vector<std::pair<Var<Scalar>, Index>> spans;
  for (const auto& p : parts) {
    out.middleCols(offset, p.cols()) = p.value();
    spans.emplace_back(p, offset);
    offset += p.cols();
  }
  return parts.front().tape->record(std::move(out), std::span<const Var<Scalar>>(parts),
                                    [spans](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                                      for (const auto& [v, off] : spans)
                                        if (t.requires_grad(v.id)) t.accumulate(v, g.middleCols(off, v.cols()));
                                    });
}

/// Rows [start, start + count).
template <typename Scalar>
Var<Scalar> slice_rows(Var<Scalar> a, Index start, Index count) {
  if (start < 0 || count < 0 || start + count > a.rows())
    throw ShapeError("slice_rows: [" + std::to_string(start) + ", " + std::to_string(start + count) + ") of " +
                     shape_string(a.rows(), a.cols()));
  const Index r = a.rows(), c = a.cols();
  return a.tape->record(a.value().middleRows(start, count), {a},
                        [a, start, count, r, c](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                          Matrix<Scalar> full = Matrix<Scalar>::Zero(r, c);
                          full.middleRows(start, count) = g;
                          t.accumulate(a, full);
                        });
}

/// Columns [start, start + count).
template <typename Scalar>
Var<Scalar> slice_cols(Var<Scalar> a, Index start, Index count) {
  if (start < 0 || count < 0 || start + count > a.cols())
    throw ShapeError("slice_cols: [" + std::to_string(start) + ", " + std::to_string(start + count) + ") of " +
                     shape_string(a.rows(), a.cols()));
  const Index r = a.rows(), c = a.cols();
  return a.tape->record(a.value().middleCols(start, count), {a},
                        [a, start, count, r, c](Tape<Scalar>& t, const Matrix<Scalar>& g) {
                          Matrix<Scalar> full = Matrix<Scalar>::Zero(r, c);
                          full.middleCols(start, count) = g;
                          t.accumulate(a, full);
                        });
}

/// Picks one entry per column: out(0, j) = a(rows[j], j), or 0 when rows[j] < 0.
template <typename Scalar>
Var<Scalar> pick(Var<Scalar> a, std::vector<Index> rows) {
  if (static_cast<Index>(rows.size()) != a.cols())
    throw ShapeError("pick: " + std::to_string(rows.size()) + " indices for " + std::to_string(a.cols()) + " columns");
  Matrix<Scalar> out = Matrix<Scalar>::Zero(1, a.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    const Index r = rows[static_cast<std::size_t>(j)];
    if (r >= a.rows()) throw ShapeError("pick: row " + std::to_string(r) + " out of range");
    if (r >= 0) out(0, j) = a.value()(r, j);
  }
  const Index nr = a.rows(), nc = a.cols();
  return a.tape->record(std::move(out), {a}, [a, rows = std::move(rows), nr, nc](Tape<Scalar>& t, const Matrix<Scalar>& g) {
    Matrix<Scalar> full = Matrix<Scalar>::Zero(nr, nc);
    for (Index j = 0; j < nc; ++j) {
      const Index r = rows[static_cast<std::size_t>(j)];
      if (r >= 0) full(r, j) = g(0, j);
    }
    t.accumulate(a, full);
  });
}

// ---------------------------------------------------------------------------
// Composites.

template <typename Scalar>
struct GruVars {
  Var<Scalar> W_z, U_z, b_z, W_r, U_r, b_r, W_n, U_n, b_n;
};

/// GRU step on the tape; same equations as the plain gru_cell.
template <typename Scalar>
Var<Scalar> gru_cell(Var<Scalar> x, Var<Scalar> h, const GruVars<Scalar>& w) {
  GruWeights<Scalar>{w.W_z.value(), w.U_z.value(), w.b_z.value(), w.W_r.value(), w.U_r.value(),
                     w.b_r.value(), w.W_n.value(), w.U_n.value(), w.b_n.value()}
      .check(x.rows(), h.rows());
  auto z = sigmoid(add(add(matmul(w.W_z, x), matmul(w.U_z, h)), w.b_z));
  auto r = sigmoid(add(add(matmul(w.W_r, x), matmul(w.U_r, h)), w.b_r));
  auto n = tanh(add(add(matmul(w.W_n, x), matmul(w.U_n, mul(r, h))), w.b_n));
  return add(mul(z, h), mul(one_minus(z), n));
}

}  // namespace kbgen::numkit
