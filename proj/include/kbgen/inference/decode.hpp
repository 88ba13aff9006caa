// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "kbgen/errors.hpp"
#include "kbgen/model/generator.hpp"

namespace kbgen::inference {

using model::Real;
using model::Vec;

struct StepTrace {
  int token = 0;
  double logprob = 0.0;
  double p_gen = 1.0;
  Vec alpha;
};

struct Hypothesis {
  std::vector<int> ids;  // EOS included when finished
  double logprob = 0.0;
  bool finished = false;
  std::vector<StepTrace> trace;

  double normalized() const { return ids.empty() ? 0.0 : logprob / static_cast<double>(ids.size()); }
};

/// What beam search needs from a model: a start state, the next-token
/// distribution from a state (plus the successor state before the token is
/// fed back), and how to feed a token.
template <typename S>
concept BeamScorer = requires(S& s, const typename S::State& st, typename S::State& mut, int token) {
  { s.start() } -> std::same_as<typename S::State>;
  { s.expand(st) } -> std::same_as<std::pair<Vec, typename S::State>>;
  { s.feed(mut, token) };
  { s.eos() } -> std::convertible_to<int>;
};

/// Argmax at every step, ties to the lowest id. Stops after EOS or max_len tokens.
template <BeamScorer S>
Hypothesis greedy_search(S& scorer, int max_len) {
  Hypothesis h;
  auto state = scorer.start();
  for (int t = 0; t < max_len; ++t) {
    auto [probs, next] = scorer.expand(state);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < probs.size(); ++i) {
      if (probs(i) > probs(best)) best = i;
    }
    const int tok = static_cast<int>(best);
    h.ids.push_back(tok);
    h.logprob += std::log(probs(best));
    if (tok == scorer.eos()) {
      h.finished = true;
      break;
    }
    scorer.feed(next, tok);
    state = std::move(next);
  }
  return h;
}

/// Keeps the `beam` best live prefixes by raw log-probability; prefixes
/// ending in EOS retire to a pool ranked by log-probability per token. The
/// search stops when nothing is live, at max_len, or when no live prefix
/// can still beat the pool (its best possible per-token score is
/// logprob / max_len). Ties go to the earlier prefix, then the lower id.
template <BeamScorer S>
Hypothesis beam_search(S& scorer, int beam, int max_len) {
  if (beam < 1) throw UsageError("beam must be >= 1");
  struct Live {
    Hypothesis hyp;
    typename S::State state;
  };
  std::vector<Live> live;
  live.push_back({Hypothesis{}, scorer.start()});
  std::vector<Hypothesis> pool;

  auto pool_best = [&]() -> const Hypothesis* {
    const Hypothesis* best = nullptr;
    for (const auto& h : pool) {
      if (!best || h.normalized() > best->normalized()) best = &h;
    }
    return best;
  };

  for (int t = 0; t < max_len && !live.empty(); ++t) {
    // (score, live index, token)
    std::vector<std::tuple<double, int, int>> cand;
    std::vector<typename S::State> successors;
    successors.reserve(live.size());
    for (std::size_t i = 0; i < live.size(); ++i) {
      auto [probs, next] = scorer.expand(live[i].state);
      successors.push_back(std::move(next));
      for (Eigen::Index k = 0; k < probs.size(); ++k) {
        if (probs(k) > 0.0) cand.emplace_back(live[i].hyp.logprob + std::log(probs(k)), static_cast<int>(i), static_cast<int>(k));
      }
    }
    const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(beam), cand.size());
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(keep), cand.end(),
                      [](const auto& a, const auto& b) {
                        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
                        if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
                        return std::get<2>(a) < std::get<2>(b);
                      });
    std::vector<Live> next_live;
    for (std::size_t c = 0; c < keep; ++c) {
      const auto [score, from, tok] = cand[c];
      Hypothesis h = live[static_cast<std::size_t>(from)].hyp;
      h.ids.push_back(tok);
      h.logprob = score;
      if (tok == scorer.eos()) {
        h.finished = true;
        pool.push_back(std::move(h));
      } else {
        auto st = successors[static_cast<std::size_t>(from)];
        scorer.feed(st, tok);
        next_live.push_back({std::move(h), std::move(st)});
      }
    }
    live = std::move(next_live);
    if (const auto* best = pool_best(); best && !live.empty()) {
      double bound = -std::numeric_limits<double>::infinity();
      for (const auto& l : live) bound = std::max(bound, l.hyp.logprob / static_cast<double>(max_len));
      if (best->normalized() >= bound) break;
    }
  }
  for (auto& l : live) pool.push_back(std::move(l.hyp));
  const Hypothesis* best = pool_best();
  if (!best) return {};
  return *best;
}

/// Adapts a trained model and one precomputed example to BeamScorer.
class ModelScorer {
 public:
  using State = model::DecoderState;
  ModelScorer(const model::ModelParams& params, const model::Precomputed& pre, model::StepOptions options = {})
      : params_(params), pre_(pre), options_(options) {}

  State start() const { return model::initial_state(pre_); }
  std::pair<Vec, State> expand(const State& s) const {
    auto out = model::decode_step(params_, pre_, s, options_);
    return {std::move(out.p_final), std::move(out.next)};
  }
  void feed(State& s, int token) const { s.previous = token; }
  int eos() const { return corpus::Vocabulary::kEos; }

 private:
  const model::ModelParams& params_;
  const model::Precomputed& pre_;
  model::StepOptions options_;
};

struct Decoded {
  std::vector<int> ids;               // without EOS
  std::vector<std::string> tokens;    // unit tokens for values
  std::string text;                   // rendered surface string
  double logprob = 0.0;               // includes the EOS step when finished
  bool finished = false;
  std::vector<StepTrace> trace;
};

/// Greedy decoding with a per-step trace of attention and p_gen.
Decoded greedy_decode(const model::ModelParams& params, const model::Precomputed& pre, int max_len = 100);

/// Beam decoding; beam = 1 gives exactly greedy_decode's tokens.
Decoded beam_decode(const model::ModelParams& params, const model::Precomputed& pre, int beam = 4,
                    int max_len = 100);

/// Fills tokens/text from ids.
Decoded finish(const model::ModelParams& params, const model::Precomputed& pre, const Hypothesis& h);

/// Replays a decoded sequence to collect alpha and p_gen per step.
std::vector<StepTrace> replay(const model::ModelParams& params, const model::Precomputed& pre,
                              const std::vector<int>& ids);

}  // namespace kbgen::inference
