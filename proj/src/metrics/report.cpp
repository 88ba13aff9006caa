// SPDX-License-Identifier: Apache-2.0
#include "kbgen/metrics/report.hpp"

#include <map>

#include "kbgen/corpus/text.hpp"
#include "kbgen/errors.hpp"
#include "kbgen/metrics/bleu.hpp"
#include "kbgen/metrics/rouge.hpp"

namespace kbgen::metrics {

EvaluationReport evaluate(const std::vector<Output>& outputs, const std::vector<corpus::Example>& gold) {
  std::map<std::string, const corpus::Example*> by_id;
  for (const auto& ex : gold) {
    if (!by_id.emplace(ex.kb.entity_id, &ex).second) throw DataError("duplicate gold entity '" + ex.kb.entity_id + "'");
  }
  std::map<std::string, const std::string*> text_of;
  for (const auto& o : outputs) {
    if (!by_id.contains(o.entity_id)) throw DataError("output for unknown entity '" + o.entity_id + "'");
    if (!text_of.emplace(o.entity_id, &o.text).second) throw DataError("duplicate output for '" + o.entity_id + "'");
  }

  EvaluationReport report;
  report.empty_generations = outputs.empty();
  std::vector<Tokens> hyps, refs;
  Counts overall, inter;
  for (const auto& ex : gold) {
    ExampleScore s;
    s.entity_id = ex.kb.entity_id;
    const auto it = text_of.find(s.entity_id);
    s.missing = it == text_of.end();
    const std::string text = s.missing ? std::string() : *it->second;
    auto hyp = corpus::tokenize_words(text);
    auto ref = corpus::tokenize_words(ex.reference_text);
    s.sentence_bleu = sentence_bleu(hyp, ref);
    s.rouge_l = rouge_l(hyp, ref).f;
    s.reconstruction = score_reconstruction(reconstruct(text, ex.kb), ex.kb);
    overall += s.reconstruction.overall_counts;
    inter += s.reconstruction.interdependent_counts;
    report.reconstruction.redundant += s.reconstruction.redundant;
    if (s.missing) ++report.missing;
    hyps.push_back(std::move(hyp));
    refs.push_back(std::move(ref));
    report.per_example.push_back(std::move(s));
  }
  report.examples = static_cast<long>(gold.size());
  report.bleu = corpus_bleu(hyps, refs);
  report.rouge_l = corpus_rouge_l(hyps, refs);
  const long redundant = report.reconstruction.redundant;
  report.reconstruction = score_reconstruction(overall, inter, redundant);
  return report;
}

nlohmann::json EvaluationReport::to_json() const {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& s : per_example) {
    auto r = s.reconstruction.to_json();
    r["entity_id"] = s.entity_id;
    r["bleu"] = s.sentence_bleu;
    r["rouge_l"] = s.rouge_l;
    r["missing"] = s.missing;
    per.push_back(std::move(r));
  }
  auto out = reconstruction.to_json();
  out["examples"] = examples;
  out["missing"] = missing;
  out["empty_generations"] = empty_generations;
  out["bleu"] = bleu;
  out["rouge_l"] = rouge_l;
  out["per_example"] = std::move(per);
  return out;
}

}  // namespace kbgen::metrics
