// SPDX-License-Identifier: Apache-2.0
#include "kbgen/inference/generations.hpp"

#include <fstream>
#include <istream>
#include "json.hpp"
#include <ostream>

#include "kbgen/errors.hpp"

namespace kbgen::inference {

using nlohmann::json;

Decoded decode_kb(const model::ModelParams& params, const corpus::KnowledgeBase& kb, int beam, int max_len) {
  const auto in = model::make_input(kb, params.lexicon(), params.config());
  const auto pre = model::precompute(params, in);
  return beam == 1 ? greedy_decode(params, pre, max_len) : beam_decode(params, pre, beam, max_len);
}

std::string format_generation(const Generation& g) {
  json j{{"entity_id", g.entity_id}, {"output", g.output}, {"logprob", g.logprob}};
  return j.dump();
}

Generation parse_generation(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("generation line is not an object");
  for (const char* key : {"entity_id", "output", "logprob"}) {
    if (!j.contains(key)) throw DataError(std::string("missing field '") + key + "'");
  }
  try {
    return {j.at("entity_id").get<std::string>(), j.at("output").get<std::string>(), j.at("logprob").get<double>()};
  } catch (const json::exception& e) {
    throw DataError(std::string("bad field type: ") + e.what());
  }
}

void write_generations(std::ostream& out, const std::vector<Generation>& gens) {
  for (const auto& g : gens) out << format_generation(g) << '\n';
}

void write_generations(const std::filesystem::path& path, const std::vector<Generation>& gens) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write generations file '" + path.string() + "'");
  write_generations(out, gens);
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<Generation> read_generations(std::istream& in) {
  std::vector<Generation> out;
  std::string line;
  long number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_generation(line));
    } catch (const DataError& e) {
      throw DataError(e.what(), number);
    }
  }
  return out;
}

std::vector<Generation> read_generations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open generations file '" + path.string() + "'");
  return read_generations(in);
}

}  // namespace kbgen::inference
