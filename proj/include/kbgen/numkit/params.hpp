// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kbgen/numkit/dense.hpp"
#include "kbgen/numkit/rng.hpp"

namespace kbgen::numkit {

using ParamId = int;

/// Named, ordered collection of learnable matrices. Insertion order is the
/// canonical order for initialization, serialization and optimizer state.
template <typename Scalar>
class ParamStore {
 public:
  ParamId add(const std::string& name, Index rows, Index cols) {
    if (index_.count(name)) throw ShapeError("duplicate parameter '" + name + "'");
    if (rows <= 0 || cols <= 0) throw ShapeError("parameter '" + name + "' has empty shape " + shape_string(rows, cols));
    const auto id = static_cast<ParamId>(values_.size());
    names_.push_back(name);
    values_.push_back(Matrix<Scalar>::Zero(rows, cols));
    index_.emplace(name, id);
    return id;
  }

  Matrix<Scalar>& operator[](ParamId id) { return values_[static_cast<std::size_t>(id)]; }
  const Matrix<Scalar>& operator[](ParamId id) const { return values_[static_cast<std::size_t>(id)]; }

  ParamId id(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) throw ShapeError("unknown parameter '" + std::string(name) + "'");
    return it->second;
  }
  bool contains(std::string_view name) const { return index_.count(std::string(name)) > 0; }
  const std::string& name(ParamId id) const { return names_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return values_.size(); }

  std::size_t element_count() const {
    std::size_t n = 0;
    for (const auto& v : values_) n += static_cast<std::size_t>(v.size());
    return n;
  }

  /// Fills every parameter, in insertion order, with U[-scale, scale].
  void init_uniform(Rng& rng, double scale) {
    for (auto& v : values_)
      for (Index c = 0; c < v.cols(); ++c)
        for (Index r = 0; r < v.rows(); ++r) v(r, c) = static_cast<Scalar>(rng.uniform(-scale, scale));
  }

 private:
  std::vector<std::string> names_;
  std::vector<Matrix<Scalar>> values_;
  std::map<std::string, ParamId> index_;
};

/// Gradient per parameter, shape-matched to a ParamStore.
template <typename Scalar>
class GradientSet {
 public:
  GradientSet() = default;
  explicit GradientSet(const ParamStore<Scalar>& params) {
    grads_.reserve(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto& p = params[static_cast<ParamId>(i)];
      grads_.push_back(Matrix<Scalar>::Zero(p.rows(), p.cols()));
    }
  }

  Matrix<Scalar>& operator[](ParamId id) { return grads_[static_cast<std::size_t>(id)]; }
  const Matrix<Scalar>& operator[](ParamId id) const { return grads_[static_cast<std::size_t>(id)]; }
  std::size_t size() const { return grads_.size(); }

  void add(const GradientSet& other, Scalar scale = Scalar(1)) {
    if (other.size() != size()) throw ShapeError("gradient sets differ in parameter count");
    for (std::size_t i = 0; i < grads_.size(); ++i) grads_[i].noalias() += scale * other.grads_[i];
  }

  void scale(Scalar s) {
    for (auto& g : grads_) g *= s;
  }

  Scalar norm() const {
    Scalar sq = 0;
    for (const auto& g : grads_) sq += g.squaredNorm();
    return std::sqrt(sq);
  }

  bool all_finite() const {
    for (const auto& g : grads_)
      if (!g.allFinite()) return false;
    return true;
  }

 private:
  std::vector<Matrix<Scalar>> grads_;
};

/// Rescales the whole set so its global L2 norm is at most max_norm.
/// Returns the norm before clipping.
template <typename Scalar>
Scalar clip_global_norm(GradientSet<Scalar>& grads, Scalar max_norm) {
  const Scalar n = grads.norm();
  if (n > max_norm && n > Scalar(0)) grads.scale(max_norm / n);
  return n;
}

}  // namespace kbgen::numkit
