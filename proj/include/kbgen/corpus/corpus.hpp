// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "kbgen/corpus/types.hpp"

namespace kbgen::corpus {

/// Reads a JSONL corpus. Blank lines are skipped; any malformed line raises
/// DataError carrying its 1-based line number.
std::vector<Example> load_corpus(const std::filesystem::path& path);
std::vector<Example> read_corpus(std::istream& in);

/// Parses one corpus line (without the line number context).
Example parse_example(const std::string& json_line);
std::string format_example(const Example& ex);

void write_corpus(const std::filesystem::path& path, const std::vector<Example>& examples);
void write_corpus(std::ostream& out, const std::vector<Example>& examples);

struct Split {
  std::vector<Example> train;
  std::vector<Example> dev;
  std::vector<Example> test;
};

/// Seeded shuffle, then floor(n/10) dev and floor(n/10) test examples with
/// the rest in train. Requires at least 10 examples.
Split split(const std::vector<Example>& examples, std::uint64_t seed);

}  // namespace kbgen::corpus
