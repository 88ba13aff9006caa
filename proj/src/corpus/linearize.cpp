// SPDX-License-Identifier: Apache-2.0
#include "kbgen/corpus/linearize.hpp"

#include "kbgen/errors.hpp"

namespace kbgen::corpus {

Linearization parse_linearization(std::string_view name) {
  if (name == "seq2seq") return Linearization::seq2seq;
  if (name == "values_only") return Linearization::values_only;
  if (name == "typed_pairs") return Linearization::typed_pairs;
  if (name == "typed_positions") return Linearization::typed_positions;
  throw UsageError("unknown linearization '" + std::string(name) +
                   "' (expected seq2seq, values_only, typed_pairs or typed_positions)");
}

std::string_view to_string(Linearization mode) {
  switch (mode) {
    case Linearization::seq2seq: return "seq2seq";
    case Linearization::values_only: return "values_only";
    case Linearization::typed_pairs: return "typed_pairs";
    case Linearization::typed_positions: return "typed_positions";
  }
  return "?";
}

std::vector<InputItem> linearize(const KnowledgeBase& kb, Linearization mode) {
  std::vector<InputItem> out;
  out.reserve(kb.size() * (mode == Linearization::seq2seq ? 2 : 1));
  for (std::size_t i = 0; i < kb.size(); ++i) {
    const auto& t = kb.triples[i];
    const int idx = static_cast<int>(i);
    switch (mode) {
      case Linearization::seq2seq:
        out.push_back({t.slot_type, "", 0, 0, idx});
        out.push_back({"", t.slot_value, 0, 0, idx});
        break;
      case Linearization::values_only:
        out.push_back({"", t.slot_value, 0, 0, idx});
        break;
      case Linearization::typed_pairs:
        out.push_back({t.slot_type, t.slot_value, 0, 0, idx});
        break;
      case Linearization::typed_positions:
        out.push_back({t.slot_type, t.slot_value, t.row, t.row_back, idx});
        break;
    }
  }
  return out;
}

std::vector<std::string> surface(const std::vector<InputItem>& items) {
  std::vector<std::string> out;
  for (const auto& it : items) {
    if (!it.type.empty()) out.push_back(it.type);
    if (!it.value.empty()) out.push_back(it.value);
  }
  return out;
}

}  // namespace kbgen::corpus
