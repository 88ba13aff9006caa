// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>

#include "kbgen/model/params.hpp"

namespace kbgen::model {

// Plain evaluation. Sequences are stored column-wise: S is (type_dim x n).

struct SlotAttentionWeights {
  const Mat& W_h;
  const Mat& W_s;
  const Mat& W_v;
  const Mat& W_c;
  const Mat& b_e;
  const Mat& v;
  static SlotAttentionWeights from(const ModelParams& p);
};

struct PositionWeights {
  const Mat& W_in;
  const Mat& W_out;
  const Mat& W_g;
  static PositionWeights from(const ModelParams& p);
};

struct AttentionOutput {
  Vec alpha;
  Vec scores;
};

/// e_i = v' tanh(W_h h + W_s s_i + W_v v_i + W_c c_i + b_e), alpha = softmax(e).
AttentionOutput slot_attention(const Vec& h, const Mat& S, const Mat& V, const Vec& coverage,
                               const SlotAttentionWeights& w);

/// Same scores from precomputed keys A = W_s S + W_v V + b_e (plus any
/// position-aware terms) and query q = W_h h.
AttentionOutput slot_attention_keys(const Mat& A, const Vec& q, const Vec& coverage, const Mat& W_c,
                                    const Mat& v);

/// F with F_ij = softmax_j(g_in(i)' W_g g_out(j)); rows sum to one.
Mat position_self_attention(const Mat& R, const PositionWeights& w);

/// (S*, V*) with s*_i = sum_k F_ik s_k.
std::pair<Mat, Mat> position_contexts(const Mat& F, const Mat& S, const Mat& V);

/// (L*_s, L*_v) = (S alpha, V alpha).
std::pair<Vec, Vec> context_vectors(const Vec& alpha, const Mat& S, const Mat& V);

// Tape versions used for training.

/// Transposed F: column i holds row i of F.
Var position_self_attention(Tape& tape, const ModelParams& p, Var R);

/// A = W_s S + W_v V + b_e, with W_s* S* + W_v* V* added when the model has
/// position-aware score terms and S*, V* are given.
Var attention_keys(Tape& tape, const ModelParams& p, Var S, Var V, const Var* S_pos = nullptr,
                   const Var* V_pos = nullptr);

/// alpha (n x 1) for one step from keys, query column q and coverage (n x 1).
Var attention_step(Var A, Var q, Var coverage, Var W_c, Var v);

}  // namespace kbgen::model
