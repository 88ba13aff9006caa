// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kbgen/corpus/types.hpp"
#include "kbgen/model/generator.hpp"

namespace kbgen::model {

/// An example converted to ids once, reused across epochs.
struct Prepared {
  std::string entity_id;
  ModelInput input;
  TargetSequence target;
};

std::vector<Prepared> prepare(const std::vector<corpus::Example>& examples, const Lexicon& lexicon,
                              const ModelConfig& config);

struct TrainOptions {
  int epochs = 20;
  int batch_size = 8;
  double learning_rate = 0.001;
  double clip_norm = 2.0;
  std::uint64_t seed = 1;  // shuffling; parameter init is done by the caller
  /// Stop once a clean pass over the training set gives a per-token
  /// negative log-likelihood below this value.
  std::optional<double> stop_below_nll;
  std::function<void(const struct EpochRecord&)> on_epoch;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;  // per token, running average over the epoch
  double train_nll = 0.0;
  double dev_loss = 0.0;    // per token, after the epoch
  double dev_nll = 0.0;
  double grad_norm = 0.0;   // mean pre-clipping norm
  std::optional<double> clean_train_nll;
  bool best = false;
  int unknown_tokens = 0;

  nlohmann::json to_json() const;
};

struct TrainResult {
  std::vector<EpochRecord> log;
  int best_epoch = 0;
  bool stopped_early = false;
};

/// Mean per-token loss over a set (total and nll).
struct SetLoss {
  double loss = 0.0;
  double nll = 0.0;
  long tokens = 0;
};
SetLoss evaluate(const ModelParams& params, const std::vector<Prepared>& data);

/// Adam with global-norm clipping, batch-averaged gradients and a seeded
/// shuffle per epoch. On return `params` holds the epoch with the lowest dev
/// loss (the last epoch when `dev` is empty). Throws NumericError if the
/// loss or gradients stop being finite.
TrainResult train(ModelParams& params, const std::vector<Prepared>& train_set, const std::vector<Prepared>& dev_set,
                  const TrainOptions& options);

}  // namespace kbgen::model
