// SPDX-License-Identifier: Apache-2.0
#include "kbgen/corpus/corpus.hpp"

#include <fstream>
#include <numeric>
#include <set>

#include "json.hpp"
#include "kbgen/corpus/text.hpp"
#include "kbgen/errors.hpp"
#include "kbgen/numkit/rng.hpp"

namespace kbgen::corpus {

using nlohmann::json;

std::vector<std::string> KnowledgeBase::unique_values() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& t : triples) {
    if (seen.insert(t.slot_value).second) out.push_back(t.slot_value);
  }
  return out;
}

KnowledgeBase make_kb(std::string entity_id, const std::vector<SlotInput>& slots) {
  if (slots.empty()) throw DataError("knowledge base has no triples");
  KnowledgeBase kb;
  kb.entity_id = std::move(entity_id);
  int previous = 0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const auto& s = slots[i];
    if (s.type.empty()) throw DataError("triple " + std::to_string(i) + " has an empty slot type");
    if (s.value.empty()) throw DataError("triple " + std::to_string(i) + " has an empty slot value");
    if (s.row < 1) throw DataError("triple " + std::to_string(i) + " has row " + std::to_string(s.row) + " < 1");
    if (s.row < previous) throw DataError("rows out of order at triple " + std::to_string(i));
    if (s.row > previous + 1) {
      throw DataError("non-contiguous rows: row " + std::to_string(s.row) + " follows row " +
                      std::to_string(previous));
    }
    previous = s.row;
    kb.triples.push_back({s.type, s.value, s.row, 0});
  }
  const int rows = kb.row_count();
  for (auto& t : kb.triples) t.row_back = rows - t.row + 1;
  return kb;
}

Example make_example(KnowledgeBase kb, std::string reference_text) {
  Example ex;
  ex.reference = collapse_values(reference_text, kb);
  if (ex.reference.empty()) throw DataError("empty reference for entity '" + kb.entity_id + "'");
  ex.kb = std::move(kb);
  ex.reference_text = std::move(reference_text);
  return ex;
}

namespace {

const json& field(const json& obj, const char* name, json::value_t type, const char* type_name) {
  auto it = obj.find(name);
  if (it == obj.end()) throw DataError(std::string("missing field '") + name + "'");
  const bool ok = type == json::value_t::number_integer
                      ? it->is_number_integer()
                      : it->type() == type;
  if (!ok) throw DataError(std::string("field '") + name + "' must be " + type_name);
  return *it;
}

}  // namespace

Example parse_example(const std::string& json_line) {
  json obj;
  try {
    obj = json::parse(json_line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed JSON: ") + e.what());
  }
  if (!obj.is_object()) throw DataError("expected a JSON object");
  const auto& id = field(obj, "entity_id", json::value_t::string, "a string");
  const auto& triples = field(obj, "triples", json::value_t::array, "an array");
  const auto& reference = field(obj, "reference", json::value_t::string, "a string");
  std::vector<SlotInput> slots;
  for (const auto& t : triples) {
    if (!t.is_object()) throw DataError("triple must be an object");
    slots.push_back({field(t, "type", json::value_t::string, "a string").get<std::string>(),
                     field(t, "value", json::value_t::string, "a string").get<std::string>(),
                     field(t, "row", json::value_t::number_integer, "an integer").get<int>()});
  }
  return make_example(make_kb(id.get<std::string>(), slots), reference.get<std::string>());
}

std::string format_example(const Example& ex) {
  json triples = json::array();
  for (const auto& t : ex.kb.triples) {
    triples.push_back({{"type", t.slot_type}, {"value", t.slot_value}, {"row", t.row}});
  }
  json obj = {{"entity_id", ex.kb.entity_id}, {"triples", triples}, {"reference", ex.reference_text}};
  return obj.dump();
}

std::vector<Example> read_corpus(std::istream& in) {
  std::vector<Example> out;
  std::string line;
  long number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_example(line));
    } catch (const DataError& e) {
      throw DataError(e.what(), number);
    }
  }
  return out;
}

std::vector<Example> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus file '" + path.string() + "'");
  return read_corpus(in);
}

void write_corpus(std::ostream& out, const std::vector<Example>& examples) {
  for (const auto& ex : examples) out << format_example(ex) << '\n';
}

void write_corpus(const std::filesystem::path& path, const std::vector<Example>& examples) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write corpus file '" + path.string() + "'");
  write_corpus(out, examples);
}

Split split(const std::vector<Example>& examples, std::uint64_t seed) {
  const std::size_t n = examples.size();
  if (n < 10) throw DataError("split needs at least 10 examples, got " + std::to_string(n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  numkit::Rng rng(seed);
  rng.shuffle(order);
  const std::size_t held = n / 10;
  Split out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ex = examples[order[i]];
    if (i < held) {
      out.dev.push_back(ex);
    } else if (i < 2 * held) {
      out.test.push_back(ex);
    } else {
      out.train.push_back(ex);
    }
  }
  return out;
}

}  // namespace kbgen::corpus
