// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "kbgen/model/config.hpp"
#include "kbgen/model/lexicon.hpp"
#include "kbgen/numkit/kernels.hpp"
#include "kbgen/numkit/params.hpp"
#include "kbgen/numkit/tape.hpp"

namespace kbgen::model {

using Real = double;
using Mat = numkit::Matrix<Real>;
using Vec = numkit::Vector<Real>;
using numkit::Index;
using numkit::ParamId;
using Store = numkit::ParamStore<Real>;
using Grads = numkit::GradientSet<Real>;
using Tape = numkit::Tape<Real>;
using Var = numkit::Var<Real>;

struct GruIds {
  ParamId W_z, U_z, b_z, W_r, U_r, b_r, W_n, U_n, b_n;
};

/// Ids of every learnable array. Names in the store follow the model
/// equations, e.g. "att.W_h", "pos.W_g", "gen.w_y".
struct ParamIds {
  // embedding tables, one row per id
  ParamId E_s, E_v, E_r, E_rb, E_y;
  GruIds enc_fwd, enc_bwd, dec;
  // slot-aware attention
  ParamId W_h, W_s, W_v, W_c, b_e, v;
  // optional position-aware score terms (-1 when disabled)
  ParamId W_s_pos = -1, W_v_pos = -1;
  // table position self-attention
  ParamId W_in, W_out, W_g;
  // output layer
  ParamId V_out, b_vocab;
  // copy gate
  ParamId w_s_gen, w_v_gen, w_h_gen, w_y_gen, b_gen;
};

class ModelParams {
 public:
  ModelParams(const ModelConfig& config, const Lexicon& lexicon);

  /// Fills all arrays with U[-init_scale, init_scale] from `seed`.
  void init(std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const Lexicon& lexicon() const { return lexicon_; }
  const ParamIds& ids() const { return ids_; }
  Store& store() { return store_; }
  const Store& store() const { return store_; }
  const Mat& operator[](ParamId id) const { return store_[id]; }

  int word_count() const { return lexicon_.words.size(); }

 private:
  ModelConfig config_;
  Lexicon lexicon_;
  Store store_;
  ParamIds ids_;
};

numkit::GruWeights<Real> gru_weights(const Store& store, const GruIds& g);
numkit::GruVars<Real> gru_vars(Tape& tape, const GruIds& g);

}  // namespace kbgen::model
