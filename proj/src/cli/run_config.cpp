// SPDX-License-Identifier: Apache-2.0
#include "kbgen/cli/run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "kbgen/errors.hpp"

namespace kbgen::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw UsageError("invalid value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

int positive_int(std::string_view key, std::string_view value) {
  const int v = parse_number<int>(key, value);
  if (v <= 0) throw UsageError(std::string(key) + " must be positive");
  return v;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw UsageError("invalid value '" + std::string(value) + "' for " + std::string(key) + " (expected true/false)");
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view raw) {
  const auto value = trim(raw);
  auto& m = model;
  if (key == "mode") m.mode = model::parse_mode(value);
  else if (key == "type_dim") m.type_dim = positive_int(key, value);
  else if (key == "value_dim") m.value_dim = positive_int(key, value);
  else if (key == "position_dim") m.position_dim = positive_int(key, value);
  else if (key == "hidden_dim") m.hidden_dim = positive_int(key, value);
  else if (key == "attention_dim") m.attention_dim = positive_int(key, value);
  else if (key == "max_rows") m.max_rows = positive_int(key, value);
  else if (key == "coverage_lambda") m.coverage_lambda = parse_number<double>(key, value);
  else if (key == "init_scale") m.init_scale = parse_number<double>(key, value);
  else if (key == "position_scores") m.position_scores = parse_bool(key, value);
  else if (key == "min_freq") min_freq = positive_int(key, value);
  else if (key == "batch_size") batch_size = positive_int(key, value);
  else if (key == "epochs") epochs = positive_int(key, value);
  else if (key == "learning_rate") learning_rate = parse_number<double>(key, value);
  else if (key == "clip_norm") clip_norm = parse_number<double>(key, value);
  else if (key == "stop_below_nll") {
    if (value == "none" || value.empty()) stop_below_nll.reset();
    else stop_below_nll = parse_number<double>(key, value);
  }
  else if (key == "beam") beam = positive_int(key, value);
  else if (key == "max_len") max_len = positive_int(key, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else throw UsageError("unknown config key '" + std::string(key) + "'");
}

void RunConfig::validate() const {
  model.validate();
  if (!(learning_rate > 0.0)) throw UsageError("learning_rate must be positive");
  if (!(clip_norm > 0.0)) throw UsageError("clip_norm must be positive");
  if (model.coverage_lambda < 0.0) throw UsageError("coverage_lambda must be >= 0");
  if (stop_below_nll && !(*stop_below_nll > 0.0)) throw UsageError("stop_below_nll must be positive");
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j{{"model", model.to_json()},   {"min_freq", min_freq},     {"batch_size", batch_size},
                   {"epochs", epochs},           {"learning_rate", learning_rate}, {"clip_norm", clip_norm},
                   {"beam", beam},               {"max_len", max_len},       {"seed", seed}};
  j["stop_below_nll"] = stop_below_nll ? nlohmann::json(*stop_below_nll) : nlohmann::json(nullptr);
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    c.model = model::ModelConfig::from_json(j.at("model"));
    c.min_freq = j.at("min_freq").get<int>();
    c.batch_size = j.at("batch_size").get<int>();
    c.epochs = j.at("epochs").get<int>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.clip_norm = j.at("clip_norm").get<double>();
    c.beam = j.at("beam").get<int>();
    c.max_len = j.at("max_len").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("stop_below_nll").is_null()) c.stop_below_nll = j.at("stop_below_nll").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad run config: ") + e.what());
  }
  return c;
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  out.precision(17);
  out << "mode = " << model::to_string(model.mode) << '\n'
      << "type_dim = " << model.type_dim << '\n'
      << "value_dim = " << model.value_dim << '\n'
      << "position_dim = " << model.position_dim << '\n'
      << "hidden_dim = " << model.hidden_dim << '\n'
      << "attention_dim = " << model.attention_dim << '\n'
      << "max_rows = " << model.max_rows << '\n'
      << "coverage_lambda = " << model.coverage_lambda << '\n'
      << "init_scale = " << model.init_scale << '\n'
      << "position_scores = " << (model.position_scores ? "true" : "false") << '\n'
      << "min_freq = " << min_freq << '\n'
      << "batch_size = " << batch_size << '\n'
      << "epochs = " << epochs << '\n'
      << "learning_rate = " << learning_rate << '\n'
      << "clip_norm = " << clip_norm << '\n'
      << "stop_below_nll = ";
  if (stop_below_nll) out << *stop_below_nll;
  else out << "none";
  out << '\n'
      << "beam = " << beam << '\n'
      << "max_len = " << max_len << '\n'
      << "seed = " << seed << '\n';
  return out.str();
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::string line;
  long number = 0;
  while (std::getline(in, line)) {
    ++number;
    auto text = trim(std::string_view(line).substr(0, line.find('#')));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError(path.string() + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    try {
      config.set(trim(text.substr(0, eq)), text.substr(eq + 1));
    } catch (const UsageError& e) {
      throw UsageError(path.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

}  // namespace kbgen::cli
