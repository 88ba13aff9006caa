// SPDX-License-Identifier: Apache-2.0
#include "kbgen/model/config.hpp"

#include "kbgen/errors.hpp"

namespace kbgen::model {

ModelMode parse_mode(std::string_view name) {
  if (name == "seq2seq") return ModelMode::seq2seq;
  if (name == "pointer") return ModelMode::pointer;
  if (name == "pointer+type" || name == "+type" || name == "type") return ModelMode::pointer_type;
  if (name == "pointer+type+position" || name == "+type+position" || name == "type+position") {
    return ModelMode::pointer_type_position;
  }
  throw UsageError("unknown mode '" + std::string(name) +
                   "' (valid modes: seq2seq, pointer, pointer+type, pointer+type+position)");
}

std::string_view to_string(ModelMode mode) {
  switch (mode) {
    case ModelMode::seq2seq: return "seq2seq";
    case ModelMode::pointer: return "pointer";
    case ModelMode::pointer_type: return "pointer+type";
    case ModelMode::pointer_type_position: return "pointer+type+position";
  }
  return "?";
}

corpus::Linearization linearization_for(ModelMode mode) {
  switch (mode) {
    case ModelMode::seq2seq: return corpus::Linearization::seq2seq;
    case ModelMode::pointer: return corpus::Linearization::values_only;
    case ModelMode::pointer_type: return corpus::Linearization::typed_pairs;
    case ModelMode::pointer_type_position: return corpus::Linearization::typed_positions;
  }
  return corpus::Linearization::typed_positions;
}

void ModelConfig::validate() const {
  auto positive = [](int v, const char* name) {
    if (v <= 0) throw UsageError(std::string(name) + " must be positive, got " + std::to_string(v));
  };
  positive(type_dim, "type_dim");
  positive(value_dim, "value_dim");
  positive(position_dim, "position_dim");
  positive(hidden_dim, "hidden_dim");
  positive(attention_dim, "attention_dim");
  positive(max_rows, "max_rows");
  if (hidden_dim % 2 != 0) throw UsageError("hidden_dim must be even (split across encoder directions)");
  if (!(coverage_lambda >= 0.0)) throw UsageError("coverage_lambda must be >= 0");
  if (!(init_scale > 0.0)) throw UsageError("init_scale must be positive");
}

nlohmann::json ModelConfig::to_json() const {
  return {{"mode", std::string(to_string(mode))},
          {"type_dim", type_dim},
          {"value_dim", value_dim},
          {"position_dim", position_dim},
          {"hidden_dim", hidden_dim},
          {"attention_dim", attention_dim},
          {"max_rows", max_rows},
          {"coverage_lambda", coverage_lambda},
          {"init_scale", init_scale},
          {"position_scores", position_scores}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  try {
    c.mode = parse_mode(j.at("mode").get<std::string>());
    c.type_dim = j.at("type_dim").get<int>();
    c.value_dim = j.at("value_dim").get<int>();
    c.position_dim = j.at("position_dim").get<int>();
    c.hidden_dim = j.at("hidden_dim").get<int>();
    c.attention_dim = j.at("attention_dim").get<int>();
    c.max_rows = j.at("max_rows").get<int>();
    c.coverage_lambda = j.at("coverage_lambda").get<double>();
    c.init_scale = j.at("init_scale").get<double>();
    c.position_scores = j.value("position_scores", false);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad model config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace kbgen::model
