// SPDX-License-Identifier: Apache-2.0
#include "kbgen/model/attention.hpp"

#include "kbgen/errors.hpp"

namespace kbgen::model {

SlotAttentionWeights SlotAttentionWeights::from(const ModelParams& p) {
  const auto& id = p.ids();
  return {p[id.W_h], p[id.W_s], p[id.W_v], p[id.W_c], p[id.b_e], p[id.v]};
}

PositionWeights PositionWeights::from(const ModelParams& p) {
  const auto& id = p.ids();
  return {p[id.W_in], p[id.W_out], p[id.W_g]};
}

AttentionOutput slot_attention_keys(const Mat& A, const Vec& q, const Vec& coverage, const Mat& W_c, const Mat& v) {
  const Index n = A.cols();
  if (n == 0) throw ShapeError("attention over an empty input");
  if (coverage.size() != n) {
    throw ShapeError("coverage " + numkit::shape_string(coverage.size(), 1) + " does not match " +
                     std::to_string(n) + " items");
  }
  Mat pre = A;
  pre.colwise() += q;
  pre.noalias() += W_c.col(0) * coverage.transpose();
  AttentionOutput out;
  out.scores = (pre.array().tanh().matrix().transpose() * v.col(0));
  out.alpha = numkit::softmax(out.scores);
  return out;
}

AttentionOutput slot_attention(const Vec& h, const Mat& S, const Mat& V, const Vec& coverage,
                               const SlotAttentionWeights& w) {
  if (S.cols() != V.cols()) throw ShapeError("S and V hold different item counts");
  Mat A = w.W_s * S + w.W_v * V;
  A.colwise() += w.b_e.col(0);
  return slot_attention_keys(A, w.W_h * h, coverage, w.W_c, w.v);
}

Mat position_self_attention(const Mat& R, const PositionWeights& w) {
  const Mat g_in = (w.W_in * R).array().tanh().matrix();
  const Mat g_out = (w.W_out * R).array().tanh().matrix();
  const Mat scores = g_in.transpose() * w.W_g * g_out;  // (n x n), row i scores context j
  Mat F(scores.rows(), scores.cols());
  for (Index i = 0; i < scores.rows(); ++i) F.row(i) = numkit::softmax(scores.row(i).transpose()).transpose();
  return F;
}

std::pair<Mat, Mat> position_contexts(const Mat& F, const Mat& S, const Mat& V) {
  if (F.rows() != S.cols() || F.cols() != S.cols() || V.cols() != S.cols()) {
    throw ShapeError("position contexts: F " + numkit::shape_of(F) + " incompatible with " +
                     std::to_string(S.cols()) + " items");
  }
  return {S * F.transpose(), V * F.transpose()};
}

std::pair<Vec, Vec> context_vectors(const Vec& alpha, const Mat& S, const Mat& V) {
  if (alpha.size() != S.cols() || alpha.size() != V.cols()) throw ShapeError("context vectors: alpha length mismatch");
  return {S * alpha, V * alpha};
}

Var position_self_attention(Tape& tape, const ModelParams& p, Var R) {
  using namespace numkit;
  const auto& id = p.ids();
  auto g_in = tanh(matmul(tape.param(id.W_in), R));
  auto g_out = tanh(matmul(tape.param(id.W_out), R));
  // scores^T: column i holds g_out(j)' W_g' g_in(i) over j
  auto scores_t = matmul(transpose(g_out), matmul(transpose(tape.param(id.W_g)), g_in));
  return softmax_cols(scores_t);
}

Var attention_keys(Tape& tape, const ModelParams& p, Var S, Var V, const Var* S_pos, const Var* V_pos) {
  using namespace numkit;
  const auto& id = p.ids();
  auto A = add(matmul(tape.param(id.W_s), S), matmul(tape.param(id.W_v), V));
  if (S_pos && V_pos && id.W_s_pos >= 0) {
    A = add(A, add(matmul(tape.param(id.W_s_pos), *S_pos), matmul(tape.param(id.W_v_pos), *V_pos)));
  }
  return add_col(A, tape.param(id.b_e));
}

Var attention_step(Var A, Var q, Var coverage, Var W_c, Var v) {
  using namespace numkit;
  auto pre = add(add_col(A, q), matmul(W_c, transpose(coverage)));
  auto e = matmul(transpose(tanh(pre)), v);
  return softmax_cols(e);
}

}  // namespace kbgen::model
