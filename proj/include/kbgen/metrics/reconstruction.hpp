// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "json.hpp"
#include "kbgen/corpus/types.hpp"

namespace kbgen::metrics {

/// One textual occurrence of a gold slot value.
struct PredictedPair {
  std::string slot_type;
  std::string slot_value;
  std::size_t gold_index = 0;  // triple it was assigned to
  int row = 0;
  std::size_t char_begin = 0;
  std::size_t char_end = 0;
  std::size_t sentence = 0;
  bool redundant = false;  // repeats a value whose gold slots are all taken
};

/// The occurrences of one gold row inside one sentence.
struct PredictedRow {
  int row = 0;
  std::size_t sentence = 0;
  std::vector<std::size_t> pairs;  // indices into ReconstructedKB::pairs
  bool complete = false;           // holds every value of the gold row
};

struct ReconstructedKB {
  std::vector<PredictedPair> pairs;
  std::vector<PredictedRow> rows;
  long redundant = 0;
};

/// Finds the gold values in `text` (case-insensitive, whitespace-collapsed,
/// trailing punctuation stripped). The k-th occurrence of a value string
/// fills the k-th gold slot carrying it, in KB order; further occurrences
/// are redundant and attach to the first such slot.
ReconstructedKB reconstruct(const std::string& text, const corpus::KnowledgeBase& gold);

struct Counts {
  long predicted = 0;
  long correct = 0;
  long gold = 0;

  Counts& operator+=(const Counts& o) {
    predicted += o.predicted;
    correct += o.correct;
    gold += o.gold;
    return *this;
  }
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool no_predictions = false;  // precision reported as 0
};

/// Throws DataError unless 0 <= correct <= predicted and correct <= gold.
Prf score(const Counts& counts);

struct ReconstructionReport {
  Counts overall_counts;
  Counts interdependent_counts;
  Prf overall;
  Prf interdependent;
  long redundant = 0;

  nlohmann::json to_json() const;
};

/// Pair level: every occurrence is a prediction, distinct gold slots found
/// are correct. Row level: each (row, sentence) group is a prediction, a
/// gold row is correct once when some group holds all of its values.
Counts overall_counts(const ReconstructedKB& rec, const corpus::KnowledgeBase& gold);
Counts interdependent_counts(const ReconstructedKB& rec, const corpus::KnowledgeBase& gold);

ReconstructionReport score_reconstruction(const Counts& overall, const Counts& interdependent, long redundant = 0);
ReconstructionReport score_reconstruction(const ReconstructedKB& rec, const corpus::KnowledgeBase& gold);

}  // namespace kbgen::metrics
