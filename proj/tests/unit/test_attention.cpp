// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "kbgen/corpus/text.hpp"
#include "kbgen/model/attention.hpp"
#include "kbgen/model/encoder.hpp"
#include "kbgen/numkit/rng.hpp"

using namespace kbgen;
using namespace kbgen::model;

namespace {

Mat random_mat(numkit::Rng& rng, Index r, Index c, double scale = 1.0) {
  Mat m(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) m(i, j) = rng.uniform(-scale, scale);
  return m;
}

struct Weights {
  Mat W_h, W_s, W_v, W_c, b_e, v;
  SlotAttentionWeights view() const { return {W_h, W_s, W_v, W_c, b_e, v}; }
};

Weights random_weights(numkit::Rng& rng, Index hd, Index sd, Index vd, Index ad) {
  return {random_mat(rng, ad, hd), random_mat(rng, ad, sd), random_mat(rng, ad, vd),
          random_mat(rng, ad, 1),  random_mat(rng, ad, 1),  random_mat(rng, 1, ad)};
}

Mat permute_cols(const Mat& m, const std::vector<Index>& perm) {
  Mat out(m.rows(), m.cols());
  for (std::size_t k = 0; k < perm.size(); ++k) out.col(static_cast<Index>(k)) = m.col(perm[k]);
  return out;
}

}  // namespace

TEST_CASE("slot attention matches a hand-evaluated scalar case") {
  // One-dimensional everything, two triples.
  Mat W_h{{0.5}}, W_s{{-1.0}}, W_v{{2.0}}, W_c{{0.3}}, b_e{{0.1}}, v{{1.5}};
  Vec h{{0.4}};
  Mat S{{1.0, -0.5}}, V{{0.2, 0.7}};
  Vec c{{0.0, 1.0}};
  const auto out = slot_attention(h, S, V, c, {W_h, W_s, W_v, W_c, b_e, v});
  const double e0 = 1.5 * std::tanh(0.5 * 0.4 - 1.0 * 1.0 + 2.0 * 0.2 + 0.3 * 0.0 + 0.1);
  const double e1 = 1.5 * std::tanh(0.5 * 0.4 - 1.0 * -0.5 + 2.0 * 0.7 + 0.3 * 1.0 + 0.1);
  const double a0 = std::exp(e0) / (std::exp(e0) + std::exp(e1));
  CHECK(out.scores(0) == doctest::Approx(e0).epsilon(1e-14));
  CHECK(out.scores(1) == doctest::Approx(e1).epsilon(1e-14));
  CHECK(out.alpha(0) == doctest::Approx(a0).epsilon(1e-14));
  CHECK(out.alpha(1) == doctest::Approx(1.0 - a0).epsilon(1e-14));
}

TEST_CASE("single triple gets all the attention") {
  numkit::Rng rng(1);
  const auto w = random_weights(rng, 4, 3, 3, 5);
  const auto out = slot_attention(random_mat(rng, 4, 1), random_mat(rng, 3, 1), random_mat(rng, 3, 1),
                                  Vec::Zero(1), w.view());
  CHECK(out.alpha(0) == 1.0);
}

TEST_CASE("zero score vector gives uniform attention") {
  numkit::Rng rng(2);
  auto w = random_weights(rng, 4, 3, 3, 5);
  w.v.setZero();
  const auto out = slot_attention(random_mat(rng, 4, 1), random_mat(rng, 3, 7), random_mat(rng, 3, 7),
                                  random_mat(rng, 7, 1), w.view());
  for (Index i = 0; i < 7; ++i) CHECK(out.alpha(i) == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
}

TEST_CASE("precomputed keys give the same attention") {
  numkit::Rng rng(3);
  const auto w = random_weights(rng, 4, 3, 2, 5);
  const Mat S = random_mat(rng, 3, 6), V = random_mat(rng, 2, 6);
  const Vec h = random_mat(rng, 4, 1), c = random_mat(rng, 6, 1).cwiseAbs();
  const auto direct = slot_attention(h, S, V, c, w.view());
  const Mat A = (w.W_s * S + w.W_v * V).colwise() + w.b_e.col(0);
  const auto keyed = slot_attention_keys(A, w.W_h * h, c, w.W_c, w.v);
  CHECK((direct.alpha - keyed.alpha).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("attention is permutation-equivariant and sums to one") {
  numkit::Rng rng(4);
  const auto w = random_weights(rng, 4, 3, 3, 5);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = rng.between(1, 9);
    const Mat S = random_mat(rng, 3, n), V = random_mat(rng, 3, n);
    const Vec h = random_mat(rng, 4, 1), c = random_mat(rng, n, 1).cwiseAbs();
    const auto base = slot_attention(h, S, V, c, w.view());
    CHECK(std::abs(base.alpha.sum() - 1.0) < 1e-12);
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    const Vec cp = permute_cols(c.transpose(), perm).transpose();
    const auto moved = slot_attention(h, permute_cols(S, perm), permute_cols(V, perm), cp, w.view());
    for (Index k = 0; k < n; ++k) {
      CHECK(moved.alpha(k) == doctest::Approx(base.alpha(perm[static_cast<std::size_t>(k)])).epsilon(1e-12));
    }
  }
}

TEST_CASE("position attention rows are distributions; identical rows give a uniform F") {
  numkit::Rng rng(5);
  const Mat W_in = random_mat(rng, 4, 6), W_out = random_mat(rng, 4, 6), W_g = random_mat(rng, 4, 4);
  const PositionWeights w{W_in, W_out, W_g};
  const Mat R = random_mat(rng, 6, 5);
  const Mat F = position_self_attention(R, w);
  for (Index i = 0; i < 5; ++i) CHECK(std::abs(F.row(i).sum() - 1.0) < 1e-12);

  Mat same(6, 4);
  for (Index j = 0; j < 4; ++j) same.col(j) = R.col(0);
  const Mat U = position_self_attention(same, w);
  CHECK((U.array() - 0.25).abs().maxCoeff() < 1e-15);
}

TEST_CASE("position attention matches its definition and is equivariant") {
  numkit::Rng rng(6);
  const Mat W_in = random_mat(rng, 3, 4), W_out = random_mat(rng, 3, 4), W_g = random_mat(rng, 3, 3);
  const PositionWeights w{W_in, W_out, W_g};
  const Mat R = random_mat(rng, 4, 5);
  const Mat F = position_self_attention(R, w);
  for (Index i = 0; i < 5; ++i) {
    std::vector<double> f(5);
    double z = 0.0;
    for (Index j = 0; j < 5; ++j) {
      const Vec gi = (W_in * R.col(i)).array().tanh();
      const Vec gj = (W_out * R.col(j)).array().tanh();
      f[static_cast<std::size_t>(j)] = std::exp(gi.dot(W_g * gj));
      z += f[static_cast<std::size_t>(j)];
    }
    for (Index j = 0; j < 5; ++j) CHECK(F(i, j) == doctest::Approx(f[static_cast<std::size_t>(j)] / z).epsilon(1e-13));
  }
  const std::vector<Index> perm{3, 0, 4, 1, 2};
  const Mat Fp = position_self_attention(permute_cols(R, perm), w);
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 5; ++j)
      CHECK(Fp(i, j) == doctest::Approx(F(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)])).epsilon(1e-13));
}

TEST_CASE("position contexts and slot contexts") {
  numkit::Rng rng(7);
  const Mat F = position_self_attention(random_mat(rng, 4, 3),
                                        {random_mat(rng, 2, 4), random_mat(rng, 2, 4), random_mat(rng, 2, 2)});
  const Mat S = random_mat(rng, 2, 3), V = random_mat(rng, 3, 3);
  const auto [Ss, Vs] = position_contexts(F, S, V);
  for (Index i = 0; i < 3; ++i) {
    Vec s = Vec::Zero(2), v = Vec::Zero(3);
    for (Index k = 0; k < 3; ++k) {
      s += F(i, k) * S.col(k);
      v += F(i, k) * V.col(k);
    }
    CHECK((Ss.col(i) - s).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((Vs.col(i) - v).cwiseAbs().maxCoeff() < 1e-15);
  }
  Vec alpha(3);
  alpha << 0.2, 0.5, 0.3;
  const auto [Ls, Lv] = context_vectors(alpha, S, V);
  CHECK((Ls - (0.2 * S.col(0) + 0.5 * S.col(1) + 0.3 * S.col(2))).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((Lv - (0.2 * V.col(0) + 0.5 * V.col(1) + 0.3 * V.col(2))).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("tape attention agrees with the plain versions") {
  auto kb = corpus::make_kb("e", {{"Name", "Ann", 1}, {"Team", "Lyon FC", 2}, {"Goals", "4", 2}, {"Team", "Graz FC", 3}});
  const auto ex = corpus::make_example(kb, "Ann played for Lyon FC and Graz FC .");
  const auto lex = build_lexicon({ex}, 1);
  ModelConfig cfg;
  cfg.type_dim = 3;
  cfg.value_dim = 3;
  cfg.position_dim = 2;
  cfg.hidden_dim = 4;
  cfg.attention_dim = 3;
  cfg.max_rows = 5;
  cfg.init_scale = 0.6;
  ModelParams p(cfg, lex);
  p.init(8);
  const auto in = make_input(kb, lex, cfg);
  Tape tape(&p.store());
  const auto e = embed_triples(tape, p, in);
  const Mat F = position_self_attention(e.R.value(), PositionWeights::from(p));
  const auto Ft = position_self_attention(tape, p, e.R);
  CHECK((Ft.value().transpose() - F).cwiseAbs().maxCoeff() < 1e-15);

  const auto keys = attention_keys(tape, p, e.S, e.V);
  const Vec h = Vec::Constant(cfg.hidden_dim, 0.3);
  const Vec c = Vec::Constant(in.size(), 0.25);
  const auto plain = slot_attention(h, e.S.value(), e.V.value(), c, SlotAttentionWeights::from(p));
  const auto q = tape.constant(p[p.ids().W_h] * h);
  const auto alpha =
      attention_step(keys, q, tape.constant(c), tape.param(p.ids().W_c), tape.param(p.ids().v));
  CHECK((alpha.value().col(0) - plain.alpha).cwiseAbs().maxCoeff() < 1e-14);
}
