// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace kbgen::corpus {

/// One KB fact: slot type, slot value and its row position read forwards
/// (row) and backwards (row_back = R - row + 1, R the number of rows).
struct Triple {
  std::string slot_type;
  std::string slot_value;
  int row = 1;
  int row_back = 1;

  bool operator==(const Triple&) const = default;
};

/// Rows are contiguous 1..R in nondecreasing order; triples sharing a row
/// are adjacent. Construct through make_kb() to get these checked.
struct KnowledgeBase {
  std::string entity_id;
  std::vector<Triple> triples;

  std::size_t size() const { return triples.size(); }
  int row_count() const { return triples.empty() ? 0 : triples.back().row; }

  /// Distinct slot values in order of first occurrence.
  std::vector<std::string> unique_values() const;

  bool operator==(const KnowledgeBase&) const = default;
};

struct SlotInput {
  std::string type;
  std::string value;
  int row = 1;
};

/// Validates rows and fills row_back. Throws DataError on violations.
KnowledgeBase make_kb(std::string entity_id, const std::vector<SlotInput>& slots);

/// A KB paired with its reference description. `reference` holds the
/// tokenized text with every slot value collapsed to one unit token.
struct Example {
  KnowledgeBase kb;
  std::string reference_text;
  std::vector<std::string> reference;

  bool operator==(const Example&) const = default;
};

/// Builds an Example, tokenizing and collapsing the reference text.
Example make_example(KnowledgeBase kb, std::string reference_text);

}  // namespace kbgen::corpus
