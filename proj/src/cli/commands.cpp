// SPDX-License-Identifier: Apache-2.0
#include "kbgen/cli/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include "kbgen/cli/run_config.hpp"
#include "kbgen/corpus/corpus.hpp"
#include "kbgen/corpus/stats.hpp"
#include "kbgen/corpus/synth.hpp"
#include "kbgen/errors.hpp"
#include "kbgen/inference/attention_dump.hpp"
#include "kbgen/inference/generations.hpp"
#include "kbgen/metrics/report.hpp"
#include "kbgen/model/checkpoint.hpp"
#include "kbgen/model/train.hpp"

namespace kbgen::cli {

namespace fs = std::filesystem;

namespace {

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("KBGEN_SEED");
  if (!raw || !*raw) return std::nullopt;
  std::uint64_t v = 0;
  const std::string_view s(raw);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw UsageError("KBGEN_SEED is not an unsigned integer");
  return v;
}

fs::path sidecar(const fs::path& ckpt, const char* suffix) {
  fs::path p = ckpt;
  p += suffix;
  return p;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

nlohmann::json vocab_file(const model::Lexicon& lex) {
  auto j = lex.to_json();
  j["fingerprint"] = model::hex64(lex.fingerprint());
  return j;
}

model::Lexicon read_vocab_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open vocabulary '" + path.string() + "'");
  try {
    auto j = nlohmann::json::parse(in);
    j.erase("fingerprint");
    return model::Lexicon::from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad vocabulary file '" + path.string() + "': " + e.what());
  }
}

std::string file_stem(const std::string& entity_id) {
  std::string out;
  for (char c : entity_id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out.empty() ? "entity" : out;
}

struct Ctx {
  std::ostream& out;
  std::ostream& err;
};

// ---- synth / stats / split -------------------------------------------------

struct SynthArgs {
  int n = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void cmd_synth(const SynthArgs& a, Ctx& ctx) {
  if (a.n < 1) throw UsageError("--n must be at least 1");
  const auto seed = a.seed.value_or(env_seed().value_or(1));
  const auto data = corpus::synth_corpus(a.n, seed, corpus::person_schema());
  corpus::write_corpus(a.out, data);
  ctx.out << "wrote " << data.size() << " examples to " << a.out << '\n';
}

struct StatsArgs {
  std::string data;
  std::string out;
};

void cmd_stats(const StatsArgs& a, Ctx& ctx) {
  const auto j = corpus::stats(corpus::load_corpus(a.data)).to_json();
  if (a.out.empty()) ctx.out << j.dump(2) << '\n';
  else write_text(a.out, j.dump(2) + "\n");
}

struct SplitArgs {
  std::string data;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

void cmd_split(const SplitArgs& a, Ctx& ctx) {
  const auto seed = a.seed.value_or(env_seed().value_or(1));
  const auto parts = corpus::split(corpus::load_corpus(a.data), seed);
  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  corpus::write_corpus(dir / "train.jsonl", parts.train);
  corpus::write_corpus(dir / "dev.jsonl", parts.dev);
  corpus::write_corpus(dir / "test.jsonl", parts.test);
  ctx.out << "train " << parts.train.size() << " dev " << parts.dev.size() << " test " << parts.test.size() << '\n';
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string dev;
  std::string config;
  std::string out;
  std::string mode;
  std::optional<int> epochs;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
};

RunConfig resolve(const std::string& config_file, const std::vector<std::string>& sets,
                  const std::optional<std::uint64_t>& seed_flag) {
  RunConfig cfg;
  if (auto s = env_seed()) cfg.seed = *s;
  if (!config_file.empty()) apply_config_file(cfg, config_file);
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (seed_flag) cfg.seed = *seed_flag;
  return cfg;
}

void cmd_train(const TrainArgs& a, Ctx& ctx) {
  RunConfig cfg = resolve(a.config, a.sets, a.seed);
  if (!a.mode.empty()) cfg.model.mode = model::parse_mode(a.mode);
  if (a.epochs) cfg.set("epochs", std::to_string(*a.epochs));
  cfg.validate();

  const auto train_ex = corpus::load_corpus(a.data);
  const auto dev_ex = a.dev.empty() ? std::vector<corpus::Example>{} : corpus::load_corpus(a.dev);
  if (train_ex.empty()) throw DataError("training corpus '" + a.data + "' is empty");

  auto lex = model::build_lexicon(train_ex, cfg.min_freq);
  model::ModelParams params(cfg.model, lex);
  params.init(cfg.seed);
  const auto train_set = model::prepare(train_ex, lex, cfg.model);
  const auto dev_set = model::prepare(dev_ex, lex, cfg.model);

  const fs::path ckpt(a.out);
  if (ckpt.has_parent_path()) fs::create_directories(ckpt.parent_path());
  const auto log_path = sidecar(ckpt, ".log.jsonl");
  std::ofstream log(log_path, std::ios::binary);
  if (!log) throw IoError("cannot write '" + log_path.string() + "'");

  model::TrainOptions opts;
  opts.epochs = cfg.epochs;
  opts.batch_size = cfg.batch_size;
  opts.learning_rate = cfg.learning_rate;
  opts.clip_norm = cfg.clip_norm;
  opts.seed = cfg.seed;
  opts.stop_below_nll = cfg.stop_below_nll;
  opts.on_epoch = [&](const model::EpochRecord& r) {
    log << r.to_json().dump() << '\n';
    log.flush();
    ctx.out << "epoch " << r.epoch << " train_loss " << r.train_loss << " dev_loss " << r.dev_loss
            << (r.best ? " *" : "") << '\n';
  };
  const auto result = model::train(params, train_set, dev_set, opts);

  nlohmann::json meta{{"run_config", cfg.to_json()},
                      {"train_examples", train_set.size()},
                      {"dev_examples", dev_set.size()},
                      {"best_epoch", result.best_epoch},
                      {"epochs_run", result.log.size()},
                      {"stopped_early", result.stopped_early}};
  model::save_checkpoint(ckpt, params, meta);
  write_text(sidecar(ckpt, ".vocab.json"), vocab_file(lex).dump(2) + "\n");
  ctx.out << "saved " << ckpt.string() << " (best epoch " << result.best_epoch << ")\n";
}

// ---- generate --------------------------------------------------------------

struct GenerateArgs {
  std::string ckpt;
  std::string data;
  std::string out;
  std::string vocab;
  std::string dump_attn;
  int beam = 4;
  int max_len = 100;
};

void cmd_generate(const GenerateArgs& a, Ctx& ctx) {
  if (a.beam < 1) throw UsageError("--beam must be at least 1");
  if (a.max_len < 1) throw UsageError("--max-len must be at least 1");
  auto ck = model::load_checkpoint(a.ckpt);
  const auto& params = ck.params;

  fs::path vocab_path = a.vocab;
  if (vocab_path.empty() && fs::exists(sidecar(a.ckpt, ".vocab.json"))) vocab_path = sidecar(a.ckpt, ".vocab.json");
  if (!vocab_path.empty()) {
    const auto lex = read_vocab_file(vocab_path);
    if (lex.fingerprint() != params.lexicon().fingerprint()) {
      throw DataError("vocabulary hash mismatch: '" + vocab_path.string() + "' has " + model::hex64(lex.fingerprint()) +
                      ", checkpoint has " + model::hex64(params.lexicon().fingerprint()));
    }
  }

  const auto data = corpus::load_corpus(a.data);
  if (!a.dump_attn.empty()) fs::create_directories(a.dump_attn);
  std::vector<inference::Generation> gens;
  gens.reserve(data.size());
  for (const auto& ex : data) {
    const auto in = model::make_input(ex.kb, params.lexicon(), params.config());
    const auto pre = model::precompute(params, in);
    const auto d = a.beam == 1 ? inference::greedy_decode(params, pre, a.max_len)
                               : inference::beam_decode(params, pre, a.beam, a.max_len);
    gens.push_back({ex.kb.entity_id, d.text, d.logprob});
    if (!a.dump_attn.empty()) {
      inference::dump_attention(d.trace, pre.F, in, fs::path(a.dump_attn) / file_stem(ex.kb.entity_id));
    }
  }
  if (a.out.empty()) {
    inference::write_generations(ctx.out, gens);
  } else {
    inference::write_generations(a.out, gens);
    ctx.out << "wrote " << gens.size() << " generations to " << a.out << '\n';
  }
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateArgs {
  std::string gen;
  std::string gold;
  std::string out;
};

void cmd_evaluate(const EvaluateArgs& a, Ctx& ctx) {
  const auto gens = inference::read_generations(a.gen);
  const auto gold = corpus::load_corpus(a.gold);
  std::vector<metrics::Output> outputs;
  outputs.reserve(gens.size());
  for (const auto& g : gens) outputs.push_back({g.entity_id, g.output});
  const auto report = metrics::evaluate(outputs, gold);
  const auto text = report.to_json().dump(2) + "\n";
  if (a.out.empty()) {
    ctx.out << text;
    return;
  }
  write_text(a.out, text);
  const auto& r = report.reconstruction;
  ctx.out << "BLEU " << report.bleu << " ROUGE-L " << report.rouge_l << " overall F1 " << r.overall.f1
          << " inter-dependent F1 " << r.interdependent.f1 << (report.empty_generations ? " (no generations)" : "")
          << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Ctx ctx{out, err};
  CLI::App app{"Knowledge-base to text generation: data, training, decoding and evaluation", "kbgen"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "write a synthetic corpus");
  s->add_option("--n", synth.n, "number of entities")->required();
  s->add_option("--seed", synth.seed, "random seed (default: KBGEN_SEED or 1)");
  s->add_option("--out", synth.out, "output JSONL")->required();

  StatsArgs stats;
  auto* st = app.add_subcommand("stats", "print corpus statistics as JSON");
  st->add_option("--data", stats.data, "corpus JSONL")->required();
  st->add_option("--out", stats.out, "write JSON here instead of stdout");

  SplitArgs split;
  auto* sp = app.add_subcommand("split", "split a corpus 80/10/10 into train/dev/test");
  sp->add_option("--data", split.data, "corpus JSONL")->required();
  sp->add_option("--out-dir", split.out_dir, "directory for train/dev/test.jsonl")->required();
  sp->add_option("--seed", split.seed, "shuffle seed (default: KBGEN_SEED or 1)");

  TrainArgs train;
  auto* tr = app.add_subcommand("train", "train a model and save a checkpoint");
  tr->add_option("--data", train.data, "training corpus JSONL")->required();
  tr->add_option("--dev", train.dev, "dev corpus JSONL for checkpoint selection");
  tr->add_option("--mode", train.mode, "seq2seq | pointer | pointer+type | pointer+type+position");
  tr->add_option("--config", train.config, "flat key = value config file");
  tr->add_option("--out", train.out, "checkpoint path")->required();
  tr->add_option("--epochs", train.epochs, "training epochs");
  tr->add_option("--seed", train.seed, "seed for initialization and shuffling");
  tr->add_option("--set", train.sets, "override a config key (key=value), repeatable");

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "decode descriptions for a corpus");
  g->add_option("--ckpt", gen.ckpt, "checkpoint")->required();
  g->add_option("--data", gen.data, "corpus JSONL")->required();
  g->add_option("--beam", gen.beam, "beam size, 1 for greedy")->capture_default_str();
  g->add_option("--max-len", gen.max_len, "maximum output tokens")->capture_default_str();
  g->add_option("--vocab", gen.vocab, "vocabulary file to check against the checkpoint");
  g->add_option("--dump-attn", gen.dump_attn, "directory for per-example attention CSVs");
  g->add_option("--out", gen.out, "generations JSONL (default: stdout)");

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "score generations against a gold corpus");
  e->add_option("--gen", ev.gen, "generations JSONL")->required();
  e->add_option("--gold", ev.gold, "gold corpus JSONL")->required();
  e->add_option("--out", ev.out, "report JSON (default: stdout)");

  try {
    // CLI11 consumes arguments from the back, without the program name.
    std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(rest.begin(), rest.end());
    app.parse(rest);
  } catch (const CLI::Success& ok) {
    return app.exit(ok, out, err);
  } catch (const CLI::ParseError& pe) {
    app.exit(pe, out, err);
    return kExitUsage;
  }

  try {
    if (*s) cmd_synth(synth, ctx);
    else if (*st) cmd_stats(stats, ctx);
    else if (*sp) cmd_split(split, ctx);
    else if (*tr) cmd_train(train, ctx);
    else if (*g) cmd_generate(gen, ctx);
    else if (*e) cmd_evaluate(ev, ctx);
  } catch (const UsageError& x) {
    err << "usage error: " << x.what() << '\n';
    for (auto* sub : app.get_subcommands()) err << sub->help();
    return kExitUsage;
  } catch (const NumericError& x) {
    err << "numeric error: " << x.what() << '\n';
    return kExitDiverged;
  } catch (const DataError& x) {
    err << "data error: " << x.what() << '\n';
    return kExitData;
  } catch (const IoError& x) {
    err << "io error: " << x.what() << '\n';
    return kExitData;
  } catch (const ShapeError& x) {
    err << "data error: " << x.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& x) {
    err << "io error: " << x.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace kbgen::cli
