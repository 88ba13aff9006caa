// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <vector>

#include "kbgen/numkit/params.hpp"

namespace kbgen::numkit {

template <typename Scalar>
struct AdamState {
  std::vector<Matrix<Scalar>> first_moment;
  std::vector<Matrix<Scalar>> second_moment;
  long step = 0;
  Scalar learning_rate = Scalar(0.001);
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);
  Scalar epsilon = Scalar(1e-8);

  AdamState() = default;
  explicit AdamState(const ParamStore<Scalar>& params, Scalar lr = Scalar(0.001)) : learning_rate(lr) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto& p = params[static_cast<ParamId>(i)];
      first_moment.push_back(Matrix<Scalar>::Zero(p.rows(), p.cols()));
      second_moment.push_back(Matrix<Scalar>::Zero(p.rows(), p.cols()));
    }
  }
};

/// One bias-corrected Adam update applied in place.
template <typename Scalar>
void adam_step(ParamStore<Scalar>& params, const GradientSet<Scalar>& grads, AdamState<Scalar>& state) {
  if (grads.size() != params.size() || state.first_moment.size() != params.size())
    throw ShapeError("adam_step: parameter, gradient and state counts differ");
  if (state.step < 0) throw ShapeError("adam_step: negative step counter");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto id = static_cast<ParamId>(i);
    const auto& g = grads[id];
    if (g.rows() != params[id].rows() || g.cols() != params[id].cols() ||
        state.first_moment[i].rows() != g.rows() || state.first_moment[i].cols() != g.cols())
      throw ShapeError("adam_step: gradient " + shape_of(g) + " does not match parameter '" + params.name(id) +
                       "' " + shape_of(params[id]));
  }
  ++state.step;
  const Scalar b1 = state.beta1, b2 = state.beta2;
  const Scalar correction1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(state.step));
  const Scalar correction2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto id = static_cast<ParamId>(i);
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    const auto& g = grads[id];
    m = b1 * m + (Scalar(1) - b1) * g;
    v = b2 * v + (Scalar(1) - b2) * g.cwiseAbs2();
    params[id].array() -= state.learning_rate * (m.array() / correction1) /
                          ((v.array() / correction2).sqrt() + state.epsilon);
  }
}

}  // namespace kbgen::numkit
