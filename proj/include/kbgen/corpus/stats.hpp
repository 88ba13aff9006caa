// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "kbgen/corpus/types.hpp"

namespace kbgen::corpus {

/// Corpus-level averages. Sentences end at "." tokens; words are the
/// non-punctuation tokens of the raw reference; slots per sentence count
/// collapsed value tokens.
struct CorpusStats {
  long entities = 0;
  double slots_per_sentence = 0.0;
  double words_per_sentence = 0.0;
  double slots_per_table = 0.0;
  double words_per_entity = 0.0;
  double sentences_per_entity = 0.0;
  double rows_per_table = 0.0;

  nlohmann::json to_json() const;
};

CorpusStats stats(const std::vector<Example>& examples);

}  // namespace kbgen::corpus
