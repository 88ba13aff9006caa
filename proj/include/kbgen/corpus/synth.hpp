// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kbgen/corpus/types.hpp"

namespace kbgen::corpus {

enum class ValuePool { person_name, date, country, team, position, appearances, goals };

/// Extra slot stored in the same row as its parent and mentioned as a clause
/// of the parent's sentence.
struct SubSlotSpec {
  std::string type;
  ValuePool pool;
  double probability = 1.0;
  std::string clause;  // "{value}" is substituted
};

struct SlotSpec {
  std::string type;
  ValuePool pool;
  int min_rows = 1;
  int max_rows = 1;
  double presence = 1.0;
  /// Sentence templates by occurrence: the first is used for the first row,
  /// the last for the final row of a repeated slot, the middle one between.
  std::vector<std::string> sentences;
  std::vector<SubSlotSpec> sub_slots;
};

struct Schema {
  std::string name;
  std::vector<SlotSpec> slots;
  double min_slots_per_table = 3.0;
  double max_slots_per_table = 10.0;

  /// Expected number of triples per KB under this schema.
  double expected_slots() const;
};

/// Footballer biographies: name, one to four club rows optionally carrying
/// appearances and goals, birth date, citizenship and playing position.
Schema person_schema();

/// Deterministic in (n, seed, schema). Every value of a KB is distinct and
/// mentioned once by the reference, so collapsing recovers all of them.
std::vector<Example> synth_corpus(int n_entities, std::uint64_t seed, const Schema& schema);

}  // namespace kbgen::corpus
