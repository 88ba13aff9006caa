// SPDX-License-Identifier: Apache-2.0
#include "kbgen/model/lexicon.hpp"

#include <algorithm>
#include <map>

#include "kbgen/errors.hpp"

namespace kbgen::model {

namespace {

corpus::Vocabulary from_counts(const std::map<std::string, long>& counts, int min_freq) {
  std::vector<std::pair<std::string, long>> kept;
  for (const auto& [tok, n] : counts) {
    if (n >= min_freq) kept.emplace_back(tok, n);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  corpus::Vocabulary v;
  for (const auto& [tok, n] : kept) v.add(tok, n);
  return v;
}

}  // namespace

Lexicon build_lexicon(const std::vector<corpus::Example>& train, int min_freq) {
  if (train.empty()) throw DataError("cannot build a lexicon from an empty training set");
  std::map<std::string, long> types, values;
  for (const auto& ex : train) {
    for (const auto& t : ex.kb.triples) {
      ++types[t.slot_type];
      ++values[t.slot_value];
    }
  }
  return {corpus::build_vocab(train, min_freq), from_counts(types, 1), from_counts(values, min_freq)};
}

nlohmann::json Lexicon::to_json() const {
  return {{"words", words.to_json()}, {"types", types.to_json()}, {"values", values.to_json()}};
}

Lexicon Lexicon::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("words") || !j.contains("types") || !j.contains("values")) {
    throw DataError("lexicon JSON needs 'words', 'types' and 'values'");
  }
  return {corpus::Vocabulary::from_json(j["words"]), corpus::Vocabulary::from_json(j["types"]),
          corpus::Vocabulary::from_json(j["values"])};
}

std::uint64_t Lexicon::fingerprint() const {
  std::uint64_t h = words.fingerprint();
  for (auto part : {types.fingerprint(), values.fingerprint()}) h = (h ^ part) * 1099511628211ull;
  return h;
}

}  // namespace kbgen::model
