// SPDX-License-Identifier: Apache-2.0
#include "kbgen/metrics/reconstruction.hpp"

#include <map>
#include <set>

#include "kbgen/corpus/text.hpp"
#include "kbgen/errors.hpp"

namespace kbgen::metrics {

ReconstructedKB reconstruct(const std::string& text, const corpus::KnowledgeBase& gold) {
  ReconstructedKB out;
  // Gold slots per normalized value pattern, in KB order.
  std::map<std::vector<std::string>, std::vector<std::size_t>> slots;
  std::vector<std::string> values;
  std::vector<std::vector<std::size_t>*> slots_of;
  for (std::size_t i = 0; i < gold.triples.size(); ++i) {
    auto pattern = corpus::value_pattern(gold.triples[i].slot_value);
    if (pattern.empty()) continue;
    auto [it, fresh] = slots.try_emplace(pattern);
    if (fresh) {
      values.push_back(gold.triples[i].slot_value);
      slots_of.push_back(&it->second);
    }
    it->second.push_back(i);
  }

  const auto matches = corpus::find_values(corpus::tokenize(text), values);
  std::vector<std::size_t> used(values.size(), 0);
  for (const auto& m : matches) {
    const auto& candidates = *slots_of[m.value];
    auto& n = used[m.value];
    PredictedPair p;
    p.redundant = n >= candidates.size();
    p.gold_index = p.redundant ? candidates.front() : candidates[n];
    ++n;
    const auto& t = gold.triples[p.gold_index];
    p.slot_type = t.slot_type;
    p.slot_value = t.slot_value;
    p.row = t.row;
    p.char_begin = m.char_begin;
    p.char_end = m.char_end;
    p.sentence = m.sentence;
    if (p.redundant) ++out.redundant;
    out.pairs.push_back(std::move(p));
  }

  std::map<std::pair<int, std::size_t>, std::size_t> group;
  for (std::size_t i = 0; i < out.pairs.size(); ++i) {
    const auto key = std::make_pair(out.pairs[i].row, out.pairs[i].sentence);
    auto [it, fresh] = group.try_emplace(key, out.rows.size());
    if (fresh) out.rows.push_back({key.first, key.second, {}, false});
    out.rows[it->second].pairs.push_back(i);
  }
  for (auto& r : out.rows) {
    std::set<std::vector<std::string>> need;
    for (const auto& t : gold.triples) {
      if (t.row == r.row) need.insert(corpus::value_pattern(t.slot_value));
    }
    for (std::size_t i : r.pairs) need.erase(corpus::value_pattern(out.pairs[i].slot_value));
    r.complete = need.empty();
  }
  return out;
}

Prf score(const Counts& c) {
  if (c.predicted < 0 || c.correct < 0 || c.gold < 0 || c.correct > c.predicted || c.correct > c.gold) {
    throw DataError("inconsistent counts: predicted " + std::to_string(c.predicted) + ", correct " +
                    std::to_string(c.correct) + ", gold " + std::to_string(c.gold));
  }
  Prf out;
  out.no_predictions = c.predicted == 0;
  if (c.predicted > 0) out.precision = static_cast<double>(c.correct) / static_cast<double>(c.predicted);
  if (c.gold > 0) out.recall = static_cast<double>(c.correct) / static_cast<double>(c.gold);
  const double s = out.precision + out.recall;
  out.f1 = s > 0.0 ? 2.0 * out.precision * out.recall / s : 0.0;
  return out;
}

Counts overall_counts(const ReconstructedKB& rec, const corpus::KnowledgeBase& gold) {
  Counts c;
  c.predicted = static_cast<long>(rec.pairs.size());
  std::set<std::size_t> found;
  for (const auto& p : rec.pairs) {
    if (!p.redundant) found.insert(p.gold_index);
  }
  c.correct = static_cast<long>(found.size());
  c.gold = static_cast<long>(gold.size());
  return c;
}

Counts interdependent_counts(const ReconstructedKB& rec, const corpus::KnowledgeBase& gold) {
  Counts c;
  c.predicted = static_cast<long>(rec.rows.size());
  std::set<int> found;
  for (const auto& r : rec.rows) {
    if (r.complete) found.insert(r.row);
  }
  c.correct = static_cast<long>(found.size());
  c.gold = gold.row_count();
  return c;
}

ReconstructionReport score_reconstruction(const Counts& overall, const Counts& interdependent, long redundant) {
  ReconstructionReport r;
  r.overall_counts = overall;
  r.interdependent_counts = interdependent;
  r.overall = score(overall);
  r.interdependent = score(interdependent);
  r.redundant = redundant;
  return r;
}

ReconstructionReport score_reconstruction(const ReconstructedKB& rec, const corpus::KnowledgeBase& gold) {
  return score_reconstruction(overall_counts(rec, gold), interdependent_counts(rec, gold), rec.redundant);
}

namespace {

nlohmann::json level_json(const Prf& s, const Counts& c) {
  return {{"precision", s.precision}, {"recall", s.recall},     {"f1", s.f1},
          {"predicted", c.predicted}, {"correct", c.correct},   {"gold", c.gold},
          {"no_predictions", s.no_predictions}};
}

}  // namespace

nlohmann::json ReconstructionReport::to_json() const {
  return {{"overall", level_json(overall, overall_counts)},
          {"interdependent", level_json(interdependent, interdependent_counts)},
          {"redundant", redundant}};
}

}  // namespace kbgen::metrics
