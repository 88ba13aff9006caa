// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "kbgen/numkit/tape.hpp"

namespace kbgen::numkit {

struct GradCheckEntry {
  std::string name;
  double max_relative_error = 0.0;
  double max_abs_gradient = 0.0;
  double max_abs_error = 0.0;
  long worst_index = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  /// ||analytic - numeric|| / max(||analytic||, ||numeric||) over the group.
  double group_relative_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double tolerance = 0.0;

  double max_relative_error() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, e.max_relative_error);
    return m;
  }
  double max_group_error() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, e.group_relative_error);
    return m;
  }
  bool passed() const { return max_relative_error() < tolerance; }
  bool passed_groupwise() const { return max_group_error() < tolerance; }
};

/// Builds the loss on a fresh tape bound to the store being checked.
template <typename Scalar>
using LossBuilder = std::function<Var<Scalar>(Tape<Scalar>&)>;

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-8});
}

/// Compares autodiff gradients with central differences
/// (f(theta + eps) - f(theta - eps)) / (2 eps), element by element. Every
/// element of every parameter is perturbed unless `only` names a subset.
template <typename Scalar>
GradCheckReport gradient_check(ParamStore<Scalar>& params, const LossBuilder<Scalar>& build, double eps,
                               double tol, const std::vector<std::string>& only = {}) {
  if (eps <= 0 || tol <= 0) throw UsageError("gradient_check: eps and tol must be positive");
  auto evaluate = [&]() -> double {
    Tape<Scalar> tape(&params);
    return static_cast<double>(build(tape).value()(0, 0));
  };

  GradientSet<Scalar> analytic(params);
  {
    Tape<Scalar> tape(&params);
    tape.backward_into(build(tape), analytic, Scalar(1));
  }
  const double base_a = evaluate();
  const double base_b = evaluate();
  if (base_a != base_b) throw NumericError("gradient_check: loss closure is not deterministic");

  GradCheckReport report;
  report.tolerance = tol;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto id = static_cast<ParamId>(i);
    if (!only.empty() && std::find(only.begin(), only.end(), params.name(id)) == only.end()) continue;
    GradCheckEntry entry;
    entry.name = params.name(id);
    auto& p = params[id];
    double diff_sq = 0.0, analytic_sq = 0.0, numeric_sq = 0.0;
    for (Index k = 0; k < p.size(); ++k) {
      const Scalar saved = p.data()[k];
      p.data()[k] = saved + static_cast<Scalar>(eps);
      const double plus = evaluate();
      p.data()[k] = saved - static_cast<Scalar>(eps);
      const double minus = evaluate();
      p.data()[k] = saved;
      const double numeric = (plus - minus) / (2 * eps);
      const double a = static_cast<double>(analytic[id].data()[k]);
      const double err = relative_error(a, numeric);
      entry.max_abs_gradient = std::max(entry.max_abs_gradient, std::abs(a));
      entry.max_abs_error = std::max(entry.max_abs_error, std::abs(a - numeric));
      diff_sq += (a - numeric) * (a - numeric);
      analytic_sq += a * a;
      numeric_sq += numeric * numeric;
      if (err > entry.max_relative_error) {
        entry.max_relative_error = err;
        entry.worst_index = static_cast<long>(k);
        entry.worst_analytic = a;
        entry.worst_numeric = numeric;
      }
    }
    const double scale = std::sqrt(std::max({analytic_sq, numeric_sq}));
    entry.group_relative_error = scale > 0.0 ? std::sqrt(diff_sq) / scale : 0.0;
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace kbgen::numkit
