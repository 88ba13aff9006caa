// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "kbgen/corpus/types.hpp"
#include "kbgen/inference/decode.hpp"

namespace kbgen::inference {

struct Generation {
  std::string entity_id;
  std::string output;
  double logprob = 0.0;

  bool operator==(const Generation&) const = default;
};

/// Decodes one KB: greedy when beam == 1, beam search otherwise.
Decoded decode_kb(const model::ModelParams& params, const corpus::KnowledgeBase& kb, int beam = 4,
                  int max_len = 100);

/// One line per generation: {"entity_id", "output", "logprob"}.
std::string format_generation(const Generation& g);
Generation parse_generation(const std::string& line);
void write_generations(std::ostream& out, const std::vector<Generation>& gens);
void write_generations(const std::filesystem::path& path, const std::vector<Generation>& gens);
std::vector<Generation> read_generations(std::istream& in);
std::vector<Generation> read_generations(const std::filesystem::path& path);

}  // namespace kbgen::inference
