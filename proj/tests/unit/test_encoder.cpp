// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include "doctest.h"
#include "kbgen/corpus/text.hpp"
#include "kbgen/errors.hpp"
#include "kbgen/model/encoder.hpp"

using namespace kbgen;
using namespace kbgen::model;

namespace {

corpus::Example small_example() {
  auto kb = corpus::make_kb("e", {{"Name", "Ann Lee", 1}, {"Team", "Haifa FC", 2}, {"Matches", "22", 2}});
  return corpus::make_example(kb, "Ann Lee played 22 games for Haifa FC .");
}

ModelConfig tiny(ModelMode mode) {
  ModelConfig c;
  c.mode = mode;
  c.type_dim = 3;
  c.value_dim = 4;
  c.position_dim = 2;
  c.hidden_dim = 6;
  c.attention_dim = 3;
  c.max_rows = 4;
  c.init_scale = 0.5;
  return c;
}

using Col = std::vector<double>;

// Scalar GRU step: z, r gates; h' = z h + (1 - z) n.
Col scalar_gru(const Col& x, const Col& h, const Store& s, const GruIds& g) {
  auto affine = [&](ParamId W, ParamId U, ParamId b, const Col& hh, std::size_t i) {
    double a = s[b](static_cast<Index>(i), 0);
    for (std::size_t j = 0; j < x.size(); ++j) a += s[W](static_cast<Index>(i), static_cast<Index>(j)) * x[j];
    for (std::size_t j = 0; j < hh.size(); ++j) a += s[U](static_cast<Index>(i), static_cast<Index>(j)) * hh[j];
    return a;
  };
  auto sig = [](double a) { return 1.0 / (1.0 + std::exp(-a)); };
  const std::size_t d = h.size();
  Col z(d), r(d), rh(d), out(d);
  for (std::size_t i = 0; i < d; ++i) {
    z[i] = sig(affine(g.W_z, g.U_z, g.b_z, h, i));
    r[i] = sig(affine(g.W_r, g.U_r, g.b_r, h, i));
  }
  for (std::size_t i = 0; i < d; ++i) rh[i] = r[i] * h[i];
  for (std::size_t i = 0; i < d; ++i) {
    const double n = std::tanh(affine(g.W_n, g.U_n, g.b_n, rh, i));
    out[i] = z[i] * h[i] + (1.0 - z[i]) * n;
  }
  return out;
}

}  // namespace

TEST_CASE("inputs per mode") {
  const auto ex = small_example();
  const auto lex = build_lexicon({ex}, 1);
  const auto full = make_input(ex.kb, lex, tiny(ModelMode::pointer_type_position));
  REQUIRE(full.size() == 3);
  CHECK(full.rows == std::vector<Index>{0, 1, 1});
  CHECK(full.rows_back == std::vector<Index>{1, 0, 0});
  CHECK(full.labels[1] == "Team:Haifa FC");
  CHECK(full.unique_count() == 3);

  const auto typed = make_input(ex.kb, lex, tiny(ModelMode::pointer_type));
  CHECK(typed.rows == std::vector<Index>{-1, -1, -1});
  CHECK(typed.type_ids == full.type_ids);

  const auto ptr = make_input(ex.kb, lex, tiny(ModelMode::pointer));
  CHECK(ptr.type_ids == std::vector<Index>{-1, -1, -1});
  CHECK(ptr.value_ids == full.value_ids);

  const auto s2s = make_input(ex.kb, lex, tiny(ModelMode::seq2seq));
  REQUIRE(s2s.size() == 6);
  CHECK(s2s.value_ids[0] == -1);
  CHECK(s2s.type_ids[1] == -1);
  CHECK(s2s.item_source == std::vector<int>{-1, 0, -1, 1, -1, 2});
}

TEST_CASE("rows beyond the position tables are rejected") {
  std::vector<corpus::SlotInput> slots;
  for (int r = 1; r <= 5; ++r) slots.push_back({"Team", "T" + std::to_string(r), r});
  const auto kb = corpus::make_kb("big", slots);
  const auto ex = corpus::make_example(kb, "T1 .");
  CHECK_THROWS_AS(make_input(kb, build_lexicon({ex}, 1), tiny(ModelMode::pointer)), DataError);
}

TEST_CASE("targets copy KB values and end with EOS") {
  const auto ex = small_example();
  const auto lex = build_lexicon({ex}, 1);
  const auto in = make_input(ex.kb, lex, tiny(ModelMode::pointer_type));
  const auto tg = make_targets(ex.reference, in, lex, ModelMode::pointer_type);
  REQUIRE(tg.size() == static_cast<int>(ex.reference.size()) + 1);
  CHECK(tg.ids.back() == corpus::Vocabulary::kEos);
  CHECK(tg.source_pick[0] == 0);
  CHECK(tg.input_word[0] == corpus::Vocabulary::kBos);
  // A copied value is fed back through the value table.
  CHECK(tg.input_word[1] == -1);
  CHECK(tg.input_value[1] == in.unique_value_ids[0]);

  const auto s2s = make_targets(ex.reference, make_input(ex.kb, lex, tiny(ModelMode::seq2seq)), lex,
                                ModelMode::seq2seq);
  for (auto sp : s2s.source_pick) CHECK(sp == -1);
}

TEST_CASE("embedded triples are concatenated table rows") {
  const auto ex = small_example();
  const auto lex = build_lexicon({ex}, 1);
  const auto cfg = tiny(ModelMode::pointer_type_position);
  ModelParams p(cfg, lex);
  p.init(5);
  const auto in = make_input(ex.kb, lex, cfg);
  Tape tape(&p.store());
  const auto e = embed_triples(tape, p, in);
  const auto& L = e.L.value();
  REQUIRE(L.rows() == cfg.slot_width());
  REQUIRE(L.cols() == 3);
  const auto& id = p.ids();
  for (int i = 0; i < 3; ++i) {
    const auto k = static_cast<std::size_t>(i);
    Vec expect(cfg.slot_width());
    expect << p[id.E_s].row(in.type_ids[k]).transpose(), p[id.E_v].row(in.value_ids[k]).transpose(),
        p[id.E_r].row(in.rows[k]).transpose(), p[id.E_rb].row(in.rows_back[k]).transpose();
    CHECK((L.col(i) - expect).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("absent fields embed as zero columns") {
  const auto ex = small_example();
  const auto lex = build_lexicon({ex}, 1);
  const auto cfg = tiny(ModelMode::pointer);
  ModelParams p(cfg, lex);
  p.init(5);
  Tape tape(&p.store());
  const auto e = embed_triples(tape, p, make_input(ex.kb, lex, cfg));
  CHECK(e.S.value().cwiseAbs().maxCoeff() == 0.0);
  CHECK(e.R.value().cwiseAbs().maxCoeff() == 0.0);
  CHECK(e.V.value().cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("bi-GRU matches a scalar oracle") {
  const auto ex = small_example();
  const auto lex = build_lexicon({ex}, 1);
  const auto cfg = tiny(ModelMode::pointer_type_position);
  ModelParams p(cfg, lex);
  p.init(9);
  const auto in = make_input(ex.kb, lex, cfg);
  Tape tape(&p.store());
  const auto e = encode(tape, p, in);
  const auto& L = e.L.value();
  const auto half = static_cast<std::size_t>(cfg.encoder_dim());

  std::vector<Col> fwd(3), bwd(3);
  Col h(half, 0.0);
  for (int t = 0; t < 3; ++t) {
    Col x(L.col(t).data(), L.col(t).data() + L.rows());
    h = scalar_gru(x, h, p.store(), p.ids().enc_fwd);
    fwd[static_cast<std::size_t>(t)] = h;
  }
  h.assign(half, 0.0);
  for (int t = 2; t >= 0; --t) {
    Col x(L.col(t).data(), L.col(t).data() + L.rows());
    h = scalar_gru(x, h, p.store(), p.ids().enc_bwd);
    bwd[static_cast<std::size_t>(t)] = h;
  }
  const auto& H = e.H.value();
  for (int t = 0; t < 3; ++t) {
    for (std::size_t i = 0; i < half; ++i) {
      CHECK(H(static_cast<Index>(i), t) == doctest::Approx(fwd[static_cast<std::size_t>(t)][i]).epsilon(1e-12));
      CHECK(H(static_cast<Index>(half + i), t) ==
            doctest::Approx(bwd[static_cast<std::size_t>(t)][i]).epsilon(1e-12));
    }
  }
  for (std::size_t i = 0; i < half; ++i) {
    CHECK(e.h_n.value()(static_cast<Index>(i), 0) == doctest::Approx(fwd[2][i]).epsilon(1e-12));
    CHECK(e.h_n.value()(static_cast<Index>(half + i), 0) == doctest::Approx(bwd[0][i]).epsilon(1e-12));
  }
}

TEST_CASE("backward direction equals forward over the reversed sequence when weights are shared") {
  const auto ex = small_example();
  const auto lex = build_lexicon({ex}, 1);
  const auto cfg = tiny(ModelMode::pointer_type_position);
  ModelParams p(cfg, lex);
  p.init(2);
  auto& s = p.store();
  const auto& f = p.ids().enc_fwd;
  const auto& b = p.ids().enc_bwd;
  for (auto [dst, src] : {std::pair{b.W_z, f.W_z}, {b.U_z, f.U_z}, {b.b_z, f.b_z}, {b.W_r, f.W_r}, {b.U_r, f.U_r},
                          {b.b_r, f.b_r}, {b.W_n, f.W_n}, {b.U_n, f.U_n}, {b.b_n, f.b_n}}) {
    s[dst] = s[src];
  }
  Tape tape(&s);
  const auto e = embed_triples(tape, p, make_input(ex.kb, lex, cfg));
  const auto zero = tape.constant(Mat::Zero(cfg.encoder_dim(), 1));
  Mat Lrev = e.L.value().rowwise().reverse();
  const auto back = gru_sequence(gru_vars(tape, b), e.L, zero, true);
  const auto fwd_rev = gru_sequence(gru_vars(tape, f), tape.constant(Lrev), zero, false);
  for (int t = 0; t < 3; ++t) {
    CHECK((back[static_cast<std::size_t>(t)].value() - fwd_rev[static_cast<std::size_t>(2 - t)].value())
              .cwiseAbs()
              .maxCoeff() < 1e-14);
  }
}

TEST_CASE("zero GRU weights keep the encoder state at zero") {
  const auto ex = small_example();
  const auto lex = build_lexicon({ex}, 1);
  const auto cfg = tiny(ModelMode::pointer_type_position);
  ModelParams p(cfg, lex);
  p.init(3);
  for (const auto& g : {p.ids().enc_fwd, p.ids().enc_bwd}) {
    for (auto id : {g.W_z, g.U_z, g.b_z, g.W_r, g.U_r, g.b_r, g.W_n, g.U_n, g.b_n}) p.store()[id].setZero();
  }
  Tape tape(&p.store());
  const auto e = encode(tape, p, make_input(ex.kb, lex, cfg));
  CHECK(e.H.value().cwiseAbs().maxCoeff() == 0.0);
  CHECK(e.h_n.value().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("the first encoder state depends on the last triple") {
  const auto ex = small_example();
  const auto lex = build_lexicon({ex}, 1);
  const auto cfg = tiny(ModelMode::pointer_type_position);
  ModelParams p(cfg, lex);
  p.init(4);
  const auto in = make_input(ex.kb, lex, cfg);
  Tape tape(&p.store());
  const auto e = encode(tape, p, in);
  const auto loss = numkit::sum(numkit::slice_cols(e.H, 0, 1));
  const auto grads = tape.backward(loss);
  // Only the backward half of column 0 sees triple 3 ("22", its own value row).
  const auto last_value = in.value_ids[2];
  CHECK(grads[p.ids().E_v].row(last_value).cwiseAbs().maxCoeff() > 0.0);
  CHECK(grads[p.ids().enc_bwd.W_z].cwiseAbs().maxCoeff() > 0.0);
}
