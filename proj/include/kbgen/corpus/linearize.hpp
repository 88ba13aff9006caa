// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

#include "kbgen/corpus/types.hpp"

namespace kbgen::corpus {

enum class Linearization { seq2seq, values_only, typed_pairs, typed_positions };

Linearization parse_linearization(std::string_view name);
std::string_view to_string(Linearization mode);

/// One encoder input item. Empty type/value and zero positions stand for
/// fields the linearization leaves out.
struct InputItem {
  std::string type;
  std::string value;
  int row = 0;
  int row_back = 0;
  int triple = -1;  // source triple index

  auto operator<=>(const InputItem&) const = default;
};

/// seq2seq interleaves types and values as separate items; values_only keeps
/// values; typed_pairs keeps (type, value); typed_positions keeps all four.
std::vector<InputItem> linearize(const KnowledgeBase& kb, Linearization mode);

/// Flat surface strings of the sequence (types and values as they appear).
std::vector<std::string> surface(const std::vector<InputItem>& items);

}  // namespace kbgen::corpus
