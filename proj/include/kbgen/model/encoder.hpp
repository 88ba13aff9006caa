// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "kbgen/corpus/types.hpp"
#include "kbgen/model/params.hpp"

namespace kbgen::model {

/// One KB in id form under a given mode. Field ids of -1 stand for fields
/// the mode leaves out; they embed as zero vectors.
struct ModelInput {
  std::vector<Index> type_ids;
  std::vector<Index> value_ids;
  std::vector<Index> rows;       // forward position table row (r - 1)
  std::vector<Index> rows_back;  // backward position table row (r̂ - 1)
  std::vector<int> item_source;  // item -> unique value, -1 for type-only items
  std::vector<std::string> labels;

  std::vector<std::string> unique_values;
  std::vector<int> unique_word_ids;     // word id of the value's unit token, -1 if not in vocabulary
  std::vector<Index> unique_value_ids;  // value-table row

  int size() const { return static_cast<int>(type_ids.size()); }
  int unique_count() const { return static_cast<int>(unique_values.size()); }
  /// Unique-value index of a unit token, -1 if it is not a value of this KB.
  int unique_index(const std::string& token) const;
};

/// Throws DataError when a row exceeds the configured position tables.
ModelInput make_input(const corpus::KnowledgeBase& kb, const Lexicon& lexicon, const ModelConfig& config);

/// Decoder inputs for a token of the extended output space (word ids, then
/// |words| + k for unique value k): a value of this KB embeds through the
/// value table, anything else through the target-word table.
struct TokenInput {
  Index word = -1;
  Index value = -1;
};
TokenInput token_input(int extended_id, const ModelInput& in, const Lexicon& lexicon);

/// Teacher-forcing view of a reference, EOS appended.
struct TargetSequence {
  std::vector<int> ids;              // extended output ids
  std::vector<Index> word_pick;      // P_vocab entry scored, -1 none
  std::vector<Index> source_pick;    // P_source entry scored, -1 none
  std::vector<Index> input_word;     // decoder input per step
  std::vector<Index> input_value;
  int unknown = 0;                   // tokens scored as UNK

  int size() const { return static_cast<int>(ids.size()); }
};

TargetSequence make_targets(const std::vector<std::string>& reference, const ModelInput& in,
                            const Lexicon& lexicon, ModelMode mode);

struct EncoderVars {
  Var S;       // type_dim x n
  Var V;       // value_dim x n
  Var R;       // 2*position_dim x n, columns r'_i = [r_i; r̂_i]
  Var L;       // slot_width x n
  Var H;       // hidden_dim x n, forward state over backward state
  Var h_n;     // final forward state over final backward state
};

/// l_i = [s_i; v_i; r_i; r̂_i] for every item.
EncoderVars embed_triples(Tape& tape, const ModelParams& params, const ModelInput& in);
/// embed_triples followed by the bi-directional GRU.
EncoderVars encode(Tape& tape, const ModelParams& params, const ModelInput& in);

/// GRU over the columns of X; input projections are batched into one
/// product per gate. Returns the state after each column, in column order.
std::vector<Var> gru_sequence(const numkit::GruVars<Real>& w, Var X, Var h0, bool reverse);

}  // namespace kbgen::model
