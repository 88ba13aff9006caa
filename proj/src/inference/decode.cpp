// SPDX-License-Identifier: Apache-2.0
#include "kbgen/inference/decode.hpp"

#include "kbgen/corpus/text.hpp"
#include "kbgen/errors.hpp"

namespace kbgen::inference {

Decoded finish(const model::ModelParams& params, const model::Precomputed& pre, const Hypothesis& h) {
  Decoded d;
  d.logprob = h.logprob;
  d.finished = h.finished;
  d.trace = h.trace;
  for (int id : h.ids) {
    if (id == corpus::Vocabulary::kEos) break;
    d.ids.push_back(id);
    d.tokens.push_back(model::output_token(id, pre.input, params.lexicon()));
  }
  d.text = corpus::render(d.tokens);
  return d;
}

std::vector<StepTrace> replay(const model::ModelParams& params, const model::Precomputed& pre,
                              const std::vector<int>& ids) {
  std::vector<StepTrace> out;
  auto state = model::initial_state(pre);
  for (int id : ids) {
    auto step = model::decode_step(params, pre, state);
    if (id < 0 || id >= step.p_final.size()) throw ShapeError("token id outside the output space");
    out.push_back({id, std::log(step.p_final(id)), step.p_gen, step.alpha});
    state = std::move(step.next);
    state.previous = id;
  }
  return out;
}

Decoded greedy_decode(const model::ModelParams& params, const model::Precomputed& pre, int max_len) {
  if (max_len < 1) throw UsageError("max_len must be >= 1");
  ModelScorer scorer(params, pre);
  auto h = greedy_search(scorer, max_len);
  h.trace = replay(params, pre, h.ids);
  return finish(params, pre, h);
}

Decoded beam_decode(const model::ModelParams& params, const model::Precomputed& pre, int beam, int max_len) {
  if (max_len < 1) throw UsageError("max_len must be >= 1");
  ModelScorer scorer(params, pre);
  auto h = beam_search(scorer, beam, max_len);
  h.trace = replay(params, pre, h.ids);
  return finish(params, pre, h);
}

}  // namespace kbgen::inference
