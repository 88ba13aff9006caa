// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "kbgen/inference/decode.hpp"

namespace kbgen::inference {

/// A matrix with column labels and optional row labels, as stored in CSV.
struct LabeledMatrix {
  std::vector<std::string> row_labels;  // empty when the CSV has no label column
  std::vector<std::string> col_labels;
  model::Mat values;
};

/// RFC 4180 quoting; values printed with 17 significant digits.
void write_csv(std::ostream& out, const LabeledMatrix& m);
LabeledMatrix read_csv(std::istream& in, bool row_labeled);
LabeledMatrix read_csv(const std::filesystem::path& path, bool row_labeled);

/// Decode steps × triples, headed by "type:value" labels.
LabeledMatrix attention_table(const std::vector<StepTrace>& trace, const model::ModelInput& in);
/// n × n position attention; rows and columns labeled by triple.
LabeledMatrix position_table(const model::Mat& F, const model::ModelInput& in);

struct AttentionFiles {
  std::filesystem::path alpha;
  std::filesystem::path position;  // empty when the mode has no position attention
};

/// Writes `<stem>.alpha.csv` and, if F is non-empty, `<stem>.F.csv`.
/// Throws IoError when a file cannot be written.
AttentionFiles dump_attention(const std::vector<StepTrace>& trace, const model::Mat& F, const model::ModelInput& in,
                              const std::filesystem::path& stem);

}  // namespace kbgen::inference
