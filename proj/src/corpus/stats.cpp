// SPDX-License-Identifier: Apache-2.0
#include "kbgen/corpus/stats.hpp"

#include "kbgen/corpus/text.hpp"
#include "kbgen/errors.hpp"

namespace kbgen::corpus {

nlohmann::json CorpusStats::to_json() const {
  return {{"entities", entities},
          {"slots_per_sentence", slots_per_sentence},
          {"words_per_sentence", words_per_sentence},
          {"slots_per_table", slots_per_table},
          {"words_per_entity", words_per_entity},
          {"sentences_per_entity", sentences_per_entity},
          {"rows_per_table", rows_per_table}};
}

CorpusStats stats(const std::vector<Example>& examples) {
  if (examples.empty()) throw DataError("cannot compute statistics of an empty corpus");
  double slots = 0, rows = 0, words = 0, sentences = 0, units = 0;
  for (const auto& ex : examples) {
    slots += static_cast<double>(ex.kb.size());
    rows += ex.kb.row_count();
    for (const auto& w : tokenize_words(ex.reference_text)) words += is_punctuation(w) ? 0 : 1;
    for (const auto& s : split_sentences(ex.reference)) {
      sentences += 1;
      for (const auto& t : s) units += is_unit_token(t) ? 1 : 0;
    }
  }
  const double n = static_cast<double>(examples.size());
  CorpusStats out;
  out.entities = static_cast<long>(examples.size());
  out.slots_per_table = slots / n;
  out.rows_per_table = rows / n;
  out.words_per_entity = words / n;
  out.sentences_per_entity = sentences / n;
  out.slots_per_sentence = sentences > 0 ? units / sentences : 0.0;
  out.words_per_sentence = sentences > 0 ? words / sentences : 0.0;
  return out;
}

}  // namespace kbgen::corpus
