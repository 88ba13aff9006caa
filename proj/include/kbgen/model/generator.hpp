// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "kbgen/model/encoder.hpp"

namespace kbgen::model {

/// (u x n) 0/1 matrix summing item attention into unique values.
Mat source_matrix(const ModelInput& in);

/// P_source: attention mass of each unique value, summed over its items.
Vec source_distribution(const Vec& alpha, const ModelInput& in);

/// Output mask over words: PAD and BOS are never produced.
const std::vector<bool>& vocab_mask(int word_count);

struct LossOptions {
  std::optional<double> coverage_lambda;  // defaults to the config value
  const Mat* h_n = nullptr;               // replaces the encoder's final state
};

struct LossVars {
  Var total;
  Var nll;
  Var coverage;  // unweighted sum of min(alpha, c)
  Var alpha;     // n x T
  Var p_gen;     // 1 x T, only in copy modes
};

/// Teacher-forced loss sum_t [-log P(y_t) + lambda sum_i min(alpha_t_i, c_t_i)]
/// recorded on `tape`.
LossVars build_sequence_loss(Tape& tape, const ModelParams& params, const ModelInput& in,
                             const TargetSequence& target, const LossOptions& options = {});

struct LossValue {
  double total = 0.0;
  double nll = 0.0;
  double coverage = 0.0;
  int tokens = 0;
  int unknown = 0;
};

LossValue sequence_loss(const ModelParams& params, const ModelInput& in, const TargetSequence& target,
                        const LossOptions& options = {});

/// Per-example quantities that stay fixed while decoding.
struct Precomputed {
  ModelInput input;
  Vec h_n;
  Mat keys;   // attention keys A, attention_dim x n
  Mat S_ctx;  // S or S*
  Mat V_ctx;  // V or V*
  Mat F;      // n x n, empty unless the mode uses positions
  Mat source; // u x n
};

Precomputed precompute(const ModelParams& params, const ModelInput& in);

struct DecoderState {
  Vec h;
  Vec coverage;
  int previous = corpus::Vocabulary::kBos;  // extended id fed at the next step
};

DecoderState initial_state(const Precomputed& pre);

struct StepOptions {
  std::optional<double> clamp_p_gen;
};

struct StepOutput {
  Vec p_final;  // over words then unique values (size |words| + u)
  Vec p_vocab;
  Vec p_source;
  Vec alpha;
  Vec coverage;  // coverage the step attended with
  double p_gen = 1.0;
  DecoderState next;  // `previous` still to be set by the caller
};

StepOutput decode_step(const ModelParams& params, const Precomputed& pre, const DecoderState& state,
                       const StepOptions& options = {});

/// Surface token of an extended id: the word, or the unit token of a value.
std::string output_token(int extended_id, const ModelInput& in, const Lexicon& lexicon);

}  // namespace kbgen::model
