// SPDX-License-Identifier: Apache-2.0
#include "kbgen/model/params.hpp"

namespace kbgen::model {

namespace {

GruIds add_gru(Store& s, const std::string& prefix, Index input, Index hidden) {
  GruIds g;
  g.W_z = s.add(prefix + ".W_z", hidden, input);
  g.U_z = s.add(prefix + ".U_z", hidden, hidden);
  g.b_z = s.add(prefix + ".b_z", hidden, 1);
  g.W_r = s.add(prefix + ".W_r", hidden, input);
  g.U_r = s.add(prefix + ".U_r", hidden, hidden);
  g.b_r = s.add(prefix + ".b_r", hidden, 1);
  g.W_n = s.add(prefix + ".W_n", hidden, input);
  g.U_n = s.add(prefix + ".U_n", hidden, hidden);
  g.b_n = s.add(prefix + ".b_n", hidden, 1);
  return g;
}

}  // namespace

ModelParams::ModelParams(const ModelConfig& config, const Lexicon& lexicon) : config_(config), lexicon_(lexicon) {
  config_.validate();
  const ModelConfig& c = config_;
  auto& s = store_;
  ids_.E_s = s.add("E_s", lexicon_.types.size(), c.type_dim);
  ids_.E_v = s.add("E_v", lexicon_.values.size(), c.value_dim);
  ids_.E_r = s.add("E_r", c.max_rows, c.position_dim);
  ids_.E_rb = s.add("E_rb", c.max_rows, c.position_dim);
  ids_.E_y = s.add("E_y", lexicon_.words.size(), c.value_dim);
  ids_.enc_fwd = add_gru(s, "enc_fwd", c.slot_width(), c.encoder_dim());
  ids_.enc_bwd = add_gru(s, "enc_bwd", c.slot_width(), c.encoder_dim());
  ids_.dec = add_gru(s, "dec", c.value_dim, c.hidden_dim);
  ids_.W_h = s.add("att.W_h", c.attention_dim, c.hidden_dim);
  ids_.W_s = s.add("att.W_s", c.attention_dim, c.type_dim);
  ids_.W_v = s.add("att.W_v", c.attention_dim, c.value_dim);
  ids_.W_c = s.add("att.W_c", c.attention_dim, 1);
  ids_.b_e = s.add("att.b_e", c.attention_dim, 1);
  ids_.v = s.add("att.v", c.attention_dim, 1);
  if (c.position_scores && c.mode == ModelMode::pointer_type_position) {
    ids_.W_s_pos = s.add("att.W_s_pos", c.attention_dim, c.type_dim);
    ids_.W_v_pos = s.add("att.W_v_pos", c.attention_dim, c.value_dim);
  }
  ids_.W_in = s.add("pos.W_in", c.attention_dim, 2 * c.position_dim);
  ids_.W_out = s.add("pos.W_out", c.attention_dim, 2 * c.position_dim);
  ids_.W_g = s.add("pos.W_g", c.attention_dim, c.attention_dim);
  ids_.V_out = s.add("out.V", lexicon_.words.size(), c.context_width());
  ids_.b_vocab = s.add("out.b_vocab", lexicon_.words.size(), 1);
  ids_.w_s_gen = s.add("gen.w_s", 1, c.type_dim);
  ids_.w_v_gen = s.add("gen.w_v", 1, c.value_dim);
  ids_.w_h_gen = s.add("gen.w_h", 1, c.hidden_dim);
  ids_.w_y_gen = s.add("gen.w_y", 1, c.value_dim);
  ids_.b_gen = s.add("gen.b", 1, 1);
}

void ModelParams::init(std::uint64_t seed) {
  numkit::Rng rng(seed);
  store_.init_uniform(rng, config_.init_scale);
}

numkit::GruWeights<Real> gru_weights(const Store& s, const GruIds& g) {
  return {s[g.W_z], s[g.U_z], s[g.b_z], s[g.W_r], s[g.U_r], s[g.b_r], s[g.W_n], s[g.U_n], s[g.b_n]};
}

numkit::GruVars<Real> gru_vars(Tape& t, const GruIds& g) {
  return {t.param(g.W_z), t.param(g.U_z), t.param(g.b_z), t.param(g.W_r), t.param(g.U_r),
          t.param(g.b_r), t.param(g.W_n), t.param(g.U_n), t.param(g.b_n)};
}

}  // namespace kbgen::model
