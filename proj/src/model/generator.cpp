// SPDX-License-Identifier: Apache-2.0
#include "kbgen/model/generator.hpp"

#include <map>
#include <mutex>

#include "kbgen/corpus/text.hpp"
#include "kbgen/errors.hpp"
#include "kbgen/model/attention.hpp"

namespace kbgen::model {

using corpus::Vocabulary;

Mat source_matrix(const ModelInput& in) {
  Mat M = Mat::Zero(in.unique_count(), in.size());
  for (int i = 0; i < in.size(); ++i) {
    const int k = in.item_source[static_cast<std::size_t>(i)];
    if (k >= 0) M(k, i) = 1.0;
  }
  return M;
}

Vec source_distribution(const Vec& alpha, const ModelInput& in) {
  if (alpha.size() != in.size()) throw ShapeError("alpha length differs from the number of input items");
  Vec out = Vec::Zero(in.unique_count());
  for (int i = 0; i < in.size(); ++i) {
    const int k = in.item_source[static_cast<std::size_t>(i)];
    if (k >= 0) out(k) += alpha(i);
  }
  return out;
}

const std::vector<bool>& vocab_mask(int word_count) {
  static std::mutex lock;
  static std::map<int, std::vector<bool>> cache;
  std::lock_guard guard(lock);
  auto it = cache.find(word_count);
  if (it == cache.end()) {
    std::vector<bool> mask(static_cast<std::size_t>(word_count), true);
    mask[Vocabulary::kPad] = false;
    mask[Vocabulary::kBos] = false;
    it = cache.emplace(word_count, std::move(mask)).first;
  }
  return it->second;
}

namespace {

struct Contexts {
  Var S_ctx;
  Var V_ctx;
  Var keys;
  Var Ft;
  bool has_f = false;
};

Contexts build_contexts(Tape& tape, const ModelParams& p, const EncoderVars& enc) {
  Contexts c{enc.S, enc.V, {}, {}};
  if (uses_positions(p.config().mode)) {
    c.Ft = position_self_attention(tape, p, enc.R);
    c.has_f = true;
    c.S_ctx = numkit::matmul(enc.S, c.Ft);
    c.V_ctx = numkit::matmul(enc.V, c.Ft);
    c.keys = attention_keys(tape, p, enc.S, enc.V, &c.S_ctx, &c.V_ctx);
  } else {
    c.keys = attention_keys(tape, p, enc.S, enc.V);
  }
  return c;
}

}  // namespace

LossVars build_sequence_loss(Tape& tape, const ModelParams& p, const ModelInput& in, const TargetSequence& target,
                             const LossOptions& options) {
  using namespace numkit;
  const auto& cfg = p.config();
  const auto& id = p.ids();
  const double lambda = options.coverage_lambda.value_or(cfg.coverage_lambda);
  const Index n = in.size();
  const Index T = target.size();
  if (T == 0) throw ShapeError("empty target sequence");

  auto enc = encode(tape, p, in);
  auto h0 = enc.h_n;
  if (options.h_n) {
    if (options.h_n->rows() != cfg.hidden_dim || options.h_n->cols() != 1) {
      throw ShapeError("h_n override has shape " + shape_of(*options.h_n));
    }
    h0 = tape.constant(*options.h_n);
  }
  auto ctx = build_contexts(tape, p, enc);

  auto Y = add(tape.param_rows(id.E_y, target.input_word), tape.param_rows(id.E_v, target.input_value));
  auto states = gru_sequence(gru_vars(tape, id.dec), Y, h0, false);
  auto Hd = concat_cols(states);
  auto Q = matmul(tape.param(id.W_h), Hd);
  auto W_c = tape.param(id.W_c);
  auto v = tape.param(id.v);

  std::vector<Var> alphas;
  alphas.reserve(static_cast<std::size_t>(T));
  auto c = tape.constant(Mat::Zero(n, 1));
  Var cov_sum = tape.constant(Mat::Zero(1, 1));
  for (Index t = 0; t < T; ++t) {
    auto alpha = attention_step(ctx.keys, slice_cols(Q, t, 1), c, W_c, v);
    if (t > 0) cov_sum = add(cov_sum, sum(min(alpha, c)));  // c^0 = 0 contributes nothing
    alphas.push_back(alpha);
    c = add(c, alpha);
  }
  auto Alpha = concat_cols(alphas);
  auto Ls = matmul(ctx.S_ctx, Alpha);
  auto Lv = matmul(ctx.V_ctx, Alpha);
  auto logits = add_col(matmul(tape.param(id.V_out), concat_rows<Real>({Hd, Ls, Lv})), tape.param(id.b_vocab));
  auto Pv = softmax_cols(logits, &vocab_mask(p.word_count()));
  auto prob = pick(Pv, target.word_pick);

  LossVars out;
  out.alpha = Alpha;
  if (copies(cfg.mode)) {
    auto z = add(add(matmul(tape.param(id.w_s_gen), Ls), matmul(tape.param(id.w_v_gen), Lv)),
                 add(matmul(tape.param(id.w_h_gen), Hd), matmul(tape.param(id.w_y_gen), Y)));
    z = add_col(z, tape.param(id.b_gen));
    auto p_gen = sigmoid(z);
    auto p_copy = sigmoid(scale(z, -1.0));  // 1 - p_gen without cancellation
    auto Ps = matmul(tape.constant(source_matrix(in)), Alpha);
    prob = add(mul(p_gen, prob), mul(p_copy, pick(Ps, target.source_pick)));
    out.p_gen = p_gen;
  }
  out.nll = scale(sum(log(prob)), -1.0);
  out.coverage = cov_sum;
  out.total = lambda == 0.0 ? out.nll : add(out.nll, scale(cov_sum, lambda));
  return out;
}

LossValue sequence_loss(const ModelParams& p, const ModelInput& in, const TargetSequence& target,
                        const LossOptions& options) {
  Tape tape(&p.store());
  auto vars = build_sequence_loss(tape, p, in, target, options);
  return {vars.total.value()(0, 0), vars.nll.value()(0, 0), vars.coverage.value()(0, 0), target.size(),
          target.unknown};
}

Precomputed precompute(const ModelParams& p, const ModelInput& in) {
  Tape tape(&p.store());
  auto enc = encode(tape, p, in);
  auto ctx = build_contexts(tape, p, enc);
  Precomputed pre;
  pre.input = in;
  pre.h_n = enc.h_n.value().col(0);
  pre.keys = ctx.keys.value();
  pre.S_ctx = ctx.S_ctx.value();
  pre.V_ctx = ctx.V_ctx.value();
  if (ctx.has_f) pre.F = ctx.Ft.value().transpose();
  pre.source = source_matrix(in);
  return pre;
}

DecoderState initial_state(const Precomputed& pre) {
  return {pre.h_n, Vec::Zero(pre.input.size()), Vocabulary::kBos};
}

StepOutput decode_step(const ModelParams& p, const Precomputed& pre, const DecoderState& state,
                       const StepOptions& options) {
  const auto& cfg = p.config();
  const auto& id = p.ids();
  const auto& lex = p.lexicon();
  const int words = p.word_count();
  const int u = pre.input.unique_count();

  const auto in = token_input(state.previous, pre.input, lex);
  const Vec y = in.word >= 0 ? Vec(p[id.E_y].row(in.word).transpose()) : Vec(p[id.E_v].row(in.value).transpose());
  StepOutput out;
  const Vec h = numkit::gru_cell(y, state.h, gru_weights(p.store(), id.dec));
  const Vec q = p[id.W_h] * h;
  auto att = slot_attention_keys(pre.keys, q, state.coverage, p[id.W_c], p[id.v]);
  out.alpha = att.alpha;
  out.coverage = state.coverage;
  const Vec Ls = pre.S_ctx * out.alpha;
  const Vec Lv = pre.V_ctx * out.alpha;
  Vec x(cfg.context_width());
  x << h, Ls, Lv;
  const Vec logits = p[id.V_out] * x + p[id.b_vocab].col(0);
  out.p_vocab = numkit::softmax(logits, &vocab_mask(words));
  out.p_source = pre.source * out.alpha;

  out.p_final = Vec::Zero(words + u);
  if (copies(cfg.mode)) {
    const double z = p[id.w_s_gen].row(0).dot(Ls) + p[id.w_v_gen].row(0).dot(Lv) + p[id.w_h_gen].row(0).dot(h) +
                     p[id.w_y_gen].row(0).dot(y) + p[id.b_gen](0, 0);
    double p_gen = numkit::sigmoid(z);
    double p_copy = numkit::sigmoid(-z);
    if (options.clamp_p_gen) {
      p_gen = *options.clamp_p_gen;
      p_copy = 1.0 - p_gen;
    }
    out.p_gen = p_gen;
    out.p_final.head(words) = p_gen * out.p_vocab;
    for (int k = 0; k < u; ++k) {
      const int w = pre.input.unique_word_ids[static_cast<std::size_t>(k)];
      out.p_final(w >= 0 ? w : words + k) += p_copy * out.p_source(k);
    }
  } else {
    out.p_gen = 1.0;
    out.p_final.head(words) = out.p_vocab;
  }
  out.next.h = h;
  out.next.coverage = state.coverage + out.alpha;
  out.next.previous = -1;
  return out;
}

std::string output_token(int extended_id, const ModelInput& in, const Lexicon& lex) {
  const int words = lex.words.size();
  if (extended_id < words) return lex.words.token(extended_id);
  const int k = extended_id - words;
  if (k >= in.unique_count()) throw ShapeError("extended id " + std::to_string(extended_id) + " outside this KB");
  return corpus::unit_token(in.unique_values[static_cast<std::size_t>(k)]);
}

}  // namespace kbgen::model
