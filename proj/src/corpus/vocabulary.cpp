// SPDX-License-Identifier: Apache-2.0
#include "kbgen/corpus/vocabulary.hpp"

#include <algorithm>
#include <map>

#include "kbgen/corpus/text.hpp"
#include "kbgen/errors.hpp"

namespace kbgen::corpus {

const std::array<std::string, Vocabulary::kReservedCount>& Vocabulary::reserved() {
  static const std::array<std::string, kReservedCount> names = {"<pad>", "<unk>", "<bos>", "<eos>"};
  return names;
}

Vocabulary::Vocabulary() {
  for (const auto& r : reserved()) add(r);
}

int Vocabulary::add(const std::string& token, long frequency) {
  if (auto it = ids_.find(token); it != ids_.end()) {
    freq_[token] += frequency;
    return it->second;
  }
  const int id = size();
  tokens_.push_back(token);
  ids_.emplace(token, id);
  freq_[token] = frequency;
  return id;
}

int Vocabulary::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || id >= size()) throw ShapeError("token id " + std::to_string(id) + " outside vocabulary of size " +
                                               std::to_string(size()));
  return tokens_[static_cast<std::size_t>(id)];
}

long Vocabulary::frequency(const std::string& token) const {
  auto it = freq_.find(token);
  return it == freq_.end() ? 0 : it->second;
}

nlohmann::json Vocabulary::to_json() const {
  nlohmann::json tokens = nlohmann::json::object();
  nlohmann::json freq = nlohmann::json::object();
  for (int i = 0; i < size(); ++i) {
    tokens[tokens_[static_cast<std::size_t>(i)]] = i;
    if (i >= kReservedCount) freq[tokens_[static_cast<std::size_t>(i)]] = frequency(tokens_[static_cast<std::size_t>(i)]);
  }
  return {{"reserved", reserved()}, {"tokens", tokens}, {"frequency", freq}};
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("reserved") || !j.contains("tokens")) {
    throw DataError("vocabulary JSON needs 'reserved' and 'tokens'");
  }
  if (j.at("reserved").get<std::vector<std::string>>() !=
      std::vector<std::string>(reserved().begin(), reserved().end())) {
    throw DataError("vocabulary reserved-token header does not match");
  }
  const auto& tokens = j.at("tokens");
  std::vector<std::string> by_id(tokens.size());
  for (auto it = tokens.begin(); it != tokens.end(); ++it) {
    if (!it.value().is_number_integer()) throw DataError("vocabulary id for '" + it.key() + "' is not an integer");
    const auto id = it.value().get<long>();
    if (id < 0 || id >= static_cast<long>(by_id.size()) || !by_id[static_cast<std::size_t>(id)].empty()) {
      throw DataError("vocabulary ids are not a bijection onto 0..n-1");
    }
    by_id[static_cast<std::size_t>(id)] = it.key();
  }
  Vocabulary v;
  for (std::size_t i = 0; i < by_id.size(); ++i) {
    if (i < kReservedCount) {
      if (by_id[i] != reserved()[i]) throw DataError("reserved token '" + reserved()[i] + "' has the wrong id");
      continue;
    }
    long f = 0;
    if (j.contains("frequency") && j["frequency"].contains(by_id[i])) f = j["frequency"][by_id[i]].get<long>();
    v.add(by_id[i], f);
  }
  return v;
}

std::uint64_t Vocabulary::fingerprint() const {
  std::uint64_t h = 14695981039346656037ull;
  for (const auto& t : tokens_) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0xffu;  // separator
    h *= 1099511628211ull;
  }
  return h;
}

Vocabulary build_vocab(const std::vector<Example>& examples, int min_freq) {
  if (examples.empty()) throw DataError("cannot build a vocabulary from an empty corpus");
  if (min_freq < 1) throw UsageError("min_freq must be >= 1");
  std::map<std::string, long> counts;
  for (const auto& ex : examples) {
    for (const auto& t : ex.reference) ++counts[t];
  }
  std::vector<std::pair<std::string, long>> kept;
  for (const auto& [tok, n] : counts) {
    if (n >= min_freq || is_unit_token(tok)) kept.emplace_back(tok, n);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary v;
  for (const auto& [tok, n] : kept) v.add(tok, n);
  return v;
}

}  // namespace kbgen::corpus
