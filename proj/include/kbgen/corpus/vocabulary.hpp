// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "kbgen/corpus/types.hpp"

namespace kbgen::corpus {

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kBos = 2;
  static constexpr int kEos = 3;
  static constexpr int kReservedCount = 4;
  static const std::array<std::string, kReservedCount>& reserved();

  Vocabulary();

  /// Adds `token` if absent; returns its id either way.
  int add(const std::string& token, long frequency = 0);
  /// Id of `token`, UNK when absent.
  int id(const std::string& token) const;
  bool contains(const std::string& token) const { return ids_.contains(token); }
  const std::string& token(int id) const;
  long frequency(const std::string& token) const;
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  nlohmann::json to_json() const;
  static Vocabulary from_json(const nlohmann::json& j);

  /// FNV-1a over the id-ordered token list.
  std::uint64_t fingerprint() const;

  bool operator==(const Vocabulary& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
  std::unordered_map<std::string, long> freq_;
};

/// Target-side vocabulary over collapsed references. Ordinary tokens need
/// `min_freq` occurrences; unit tokens are always kept since they can be
/// copied. Ids are assigned by descending frequency, ties by token.
Vocabulary build_vocab(const std::vector<Example>& examples, int min_freq = 5);

}  // namespace kbgen::corpus
