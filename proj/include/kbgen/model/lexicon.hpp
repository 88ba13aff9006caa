// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "kbgen/corpus/types.hpp"
#include "kbgen/corpus/vocabulary.hpp"

namespace kbgen::model {

/// The three id spaces of a model: output words (including value unit
/// tokens), slot types and slot values.
struct Lexicon {
  corpus::Vocabulary words;
  corpus::Vocabulary types;
  corpus::Vocabulary values;

  nlohmann::json to_json() const;
  static Lexicon from_json(const nlohmann::json& j);
  std::uint64_t fingerprint() const;
  bool operator==(const Lexicon&) const = default;
};

/// Words and values below `min_freq` map to UNK; every training slot type
/// is kept. Values rare in training share the UNK value row so that row is
/// trained before it meets unseen test values.
Lexicon build_lexicon(const std::vector<corpus::Example>& train, int min_freq = 5);

}  // namespace kbgen::model
