// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "json.hpp"
#include "kbgen/corpus/linearize.hpp"

namespace kbgen::model {

/// The four ablation configurations.
enum class ModelMode { seq2seq, pointer, pointer_type, pointer_type_position };

/// Accepts "seq2seq", "pointer", "pointer+type", "pointer+type+position"
/// and the short forms "type", "+type", "type+position", "+type+position".
ModelMode parse_mode(std::string_view name);
std::string_view to_string(ModelMode mode);
corpus::Linearization linearization_for(ModelMode mode);
inline bool copies(ModelMode m) { return m != ModelMode::seq2seq; }
inline bool uses_positions(ModelMode m) { return m == ModelMode::pointer_type_position; }

struct ModelConfig {
  ModelMode mode = ModelMode::pointer_type_position;
  int type_dim = 256;
  int value_dim = 256;
  int position_dim = 5;
  int hidden_dim = 256;     // decoder; each encoder direction gets half
  int attention_dim = 256;
  int max_rows = 64;
  double coverage_lambda = 1.5;
  double init_scale = 0.08;
  /// Adds W_s* s*_i + W_v* v*_i to the attention score in the position mode.
  /// Off, the position contexts only reach the decoder through L*_s and L*_v.
  bool position_scores = true;

  int slot_width() const { return type_dim + value_dim + 2 * position_dim; }
  int encoder_dim() const { return hidden_dim / 2; }
  int context_width() const { return hidden_dim + type_dim + value_dim; }

  /// Throws UsageError naming the first invalid field.
  void validate() const;

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);
  bool operator==(const ModelConfig&) const = default;
};

static_assert(ModelConfig{}.type_dim + ModelConfig{}.value_dim + 2 * ModelConfig{}.position_dim == 522,
              "default slot embedding width must be 522");

}  // namespace kbgen::model
