// SPDX-License-Identifier: Apache-2.0
#include "kbgen/model/encoder.hpp"

#include <map>

#include "kbgen/corpus/linearize.hpp"
#include "kbgen/corpus/text.hpp"
#include "kbgen/errors.hpp"

namespace kbgen::model {

using corpus::Vocabulary;

int ModelInput::unique_index(const std::string& token) const {
  if (!corpus::is_unit_token(token)) return -1;
  const auto value = corpus::unit_value(token);
  for (int k = 0; k < unique_count(); ++k) {
    if (unique_values[static_cast<std::size_t>(k)] == value) return k;
  }
  return -1;
}

ModelInput make_input(const corpus::KnowledgeBase& kb, const Lexicon& lex, const ModelConfig& config) {
  if (kb.size() == 0) throw DataError("cannot encode an empty knowledge base");
  if (kb.row_count() > config.max_rows) {
    throw DataError("knowledge base '" + kb.entity_id + "' has " + std::to_string(kb.row_count()) +
                    " rows, position tables hold " + std::to_string(config.max_rows));
  }
  ModelInput in;
  std::map<std::string, int> unique;
  for (const auto& v : kb.unique_values()) {
    unique.emplace(v, in.unique_count());
    in.unique_values.push_back(v);
    const auto word = corpus::unit_token(v);
    in.unique_word_ids.push_back(lex.words.contains(word) ? lex.words.id(word) : -1);
    in.unique_value_ids.push_back(lex.values.id(v));
  }
  for (const auto& item : corpus::linearize(kb, linearization_for(config.mode))) {
    in.type_ids.push_back(item.type.empty() ? -1 : lex.types.id(item.type));
    in.value_ids.push_back(item.value.empty() ? -1 : lex.values.id(item.value));
    in.rows.push_back(item.row > 0 ? item.row - 1 : -1);
    in.rows_back.push_back(item.row_back > 0 ? item.row_back - 1 : -1);
    in.item_source.push_back(item.value.empty() ? -1 : unique.at(item.value));
    in.labels.push_back(item.type + ":" + item.value);
  }
  return in;
}

TokenInput token_input(int id, const ModelInput& in, const Lexicon& lex) {
  const int words = lex.words.size();
  if (id >= words) {
    const int k = id - words;
    if (k >= in.unique_count()) throw ShapeError("extended id " + std::to_string(id) + " outside this KB");
    return {-1, in.unique_value_ids[static_cast<std::size_t>(k)]};
  }
  const int k = in.unique_index(lex.words.token(id));
  if (k >= 0) return {-1, in.unique_value_ids[static_cast<std::size_t>(k)]};
  return {id, -1};
}

TargetSequence make_targets(const std::vector<std::string>& reference, const ModelInput& in, const Lexicon& lex,
                            ModelMode mode) {
  TargetSequence out;
  const int words = lex.words.size();
  TokenInput prev{Vocabulary::kBos, -1};
  auto push = [&](int id, Index wp, Index sp) {
    out.ids.push_back(id);
    out.word_pick.push_back(wp);
    out.source_pick.push_back(sp);
    out.input_word.push_back(prev.word);
    out.input_value.push_back(prev.value);
  };
  for (const auto& tok : reference) {
    const int k = in.unique_index(tok);
    const bool known = lex.words.contains(tok);
    const int w = lex.words.id(tok);
    if (k >= 0 && copies(mode)) {
      push(known ? w : words + k, known ? w : -1, k);
    } else {
      if (!known) ++out.unknown;
      push(w, w, -1);
    }
    prev = k >= 0 ? TokenInput{-1, in.unique_value_ids[static_cast<std::size_t>(k)]} : TokenInput{w, -1};
  }
  push(Vocabulary::kEos, Vocabulary::kEos, -1);
  return out;
}

EncoderVars embed_triples(Tape& tape, const ModelParams& p, const ModelInput& in) {
  if (in.size() == 0) throw ShapeError("encoder input is empty");
  const auto& id = p.ids();
  EncoderVars e;
  e.S = tape.param_rows(id.E_s, in.type_ids);
  e.V = tape.param_rows(id.E_v, in.value_ids);
  auto rf = tape.param_rows(id.E_r, in.rows);
  auto rb = tape.param_rows(id.E_rb, in.rows_back);
  e.R = numkit::concat_rows<Real>({rf, rb});
  e.L = numkit::concat_rows<Real>({e.S, e.V, rf, rb});
  return e;
}

std::vector<Var> gru_sequence(const numkit::GruVars<Real>& w, Var X, Var h0, bool reverse) {
  using namespace numkit;
  auto XZ = add_col(matmul(w.W_z, X), w.b_z);
  auto XR = add_col(matmul(w.W_r, X), w.b_r);
  auto XN = add_col(matmul(w.W_n, X), w.b_n);
  const Index n = X.cols();
  std::vector<Var> states(static_cast<std::size_t>(n));
  Var h = h0;
  for (Index k = 0; k < n; ++k) {
    const Index t = reverse ? n - 1 - k : k;
    auto z = sigmoid(add(slice_cols(XZ, t, 1), matmul(w.U_z, h)));
    auto r = sigmoid(add(slice_cols(XR, t, 1), matmul(w.U_r, h)));
    auto c = tanh(add(slice_cols(XN, t, 1), matmul(w.U_n, mul(r, h))));
    h = add(mul(z, h), mul(one_minus(z), c));
    states[static_cast<std::size_t>(t)] = h;
  }
  return states;
}

EncoderVars encode(Tape& tape, const ModelParams& p, const ModelInput& in) {
  auto e = embed_triples(tape, p, in);
  const Index half = p.config().encoder_dim();
  auto zero = tape.constant(Mat::Zero(half, 1));
  auto fwd = gru_sequence(gru_vars(tape, p.ids().enc_fwd), e.L, zero, false);
  auto bwd = gru_sequence(gru_vars(tape, p.ids().enc_bwd), e.L, zero, true);
  e.H = numkit::concat_rows<Real>({numkit::concat_cols(fwd), numkit::concat_cols(bwd)});
  e.h_n = numkit::concat_rows<Real>({fwd.back(), bwd.front()});
  return e;
}

}  // namespace kbgen::model
