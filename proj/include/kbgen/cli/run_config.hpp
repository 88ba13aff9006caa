// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "kbgen/model/config.hpp"

namespace kbgen::cli {

/// Everything a run needs beyond the input files. Defaults follow the
/// published settings (embeddings 256/256/5, hidden 256, lambda 1.5,
/// learning rate 0.001, vocabulary threshold 5).
struct RunConfig {
  model::ModelConfig model;
  int min_freq = 5;
  int batch_size = 8;
  int epochs = 20;
  double learning_rate = 0.001;
  double clip_norm = 2.0;
  std::optional<double> stop_below_nll;
  int beam = 4;
  int max_len = 100;
  std::uint64_t seed = 1;

  /// Throws UsageError for unknown keys and unparsable or non-positive values.
  void set(std::string_view key, std::string_view value);
  void validate() const;
  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  /// Flat "key = value" lines, one per field.
  std::string to_text() const;
};

/// Reads "key = value" lines; blank lines and '#' comments are skipped.
/// Throws UsageError on bad lines (with the line number) and IoError if the
/// file cannot be opened.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

}  // namespace kbgen::cli
