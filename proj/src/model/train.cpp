// SPDX-License-Identifier: Apache-2.0
#include "kbgen/model/train.hpp"

#include <cmath>
#include <numeric>

#include "kbgen/errors.hpp"
#include "kbgen/numkit/adam.hpp"

namespace kbgen::model {

std::vector<Prepared> prepare(const std::vector<corpus::Example>& examples, const Lexicon& lexicon,
                              const ModelConfig& config) {
  std::vector<Prepared> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    auto in = make_input(ex.kb, lexicon, config);
    auto tg = make_targets(ex.reference, in, lexicon, config.mode);
    out.push_back({ex.kb.entity_id, std::move(in), std::move(tg)});
  }
  return out;
}

nlohmann::json EpochRecord::to_json() const {
  nlohmann::json j = {{"epoch", epoch},          {"train_loss", train_loss}, {"train_nll", train_nll},
                      {"dev_loss", dev_loss},    {"dev_nll", dev_nll},       {"grad_norm", grad_norm},
                      {"best", best},            {"unknown_tokens", unknown_tokens}};
  if (clean_train_nll) j["clean_train_nll"] = *clean_train_nll;
  return j;
}

SetLoss evaluate(const ModelParams& params, const std::vector<Prepared>& data) {
  SetLoss out;
  double total = 0.0, nll = 0.0;
  for (const auto& ex : data) {
    const auto v = sequence_loss(params, ex.input, ex.target);
    total += v.total;
    nll += v.nll;
    out.tokens += v.tokens;
  }
  if (out.tokens > 0) {
    out.loss = total / static_cast<double>(out.tokens);
    out.nll = nll / static_cast<double>(out.tokens);
  }
  return out;
}

TrainResult train(ModelParams& params, const std::vector<Prepared>& train_set, const std::vector<Prepared>& dev_set,
                  const TrainOptions& options) {
  if (train_set.empty()) throw DataError("training set is empty");
  if (options.epochs < 1) throw UsageError("epochs must be >= 1");
  if (options.batch_size < 1) throw UsageError("batch_size must be >= 1");
  if (!(options.learning_rate >= 0.0)) throw UsageError("learning_rate must be >= 0");

  auto& store = params.store();
  numkit::AdamState<Real> adam(store, options.learning_rate);
  numkit::Rng rng(options.seed);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result;
  Store best = store;
  double best_dev = std::numeric_limits<double>::infinity();
  Grads grads(store);

  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    rng.shuffle(order);
    EpochRecord rec;
    rec.epoch = epoch;
    double total = 0.0, nll = 0.0, norm_sum = 0.0;
    long tokens = 0;
    int batches = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(options.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(options.batch_size));
      const double weight = 1.0 / static_cast<double>(end - start);
      for (std::size_t g = 0; g < grads.size(); ++g) grads[static_cast<ParamId>(g)].setZero();
      for (std::size_t k = start; k < end; ++k) {
        const auto& ex = train_set[order[k]];
        Tape tape(&store);
        LossVars vars;
        try {
          vars = build_sequence_loss(tape, params, ex.input, ex.target);
        } catch (const NumericError& e) {
          throw NumericError("training diverged at epoch " + std::to_string(epoch) + " on '" + ex.entity_id +
                             "': " + e.what());
        }
        const double value = vars.total.value()(0, 0);
        if (!std::isfinite(value)) {
          throw NumericError("training diverged at epoch " + std::to_string(epoch) + ": loss is not finite");
        }
        total += value;
        nll += vars.nll.value()(0, 0);
        tokens += ex.target.size();
        rec.unknown_tokens += ex.target.unknown;
        tape.backward_into(vars.total, grads, weight);
      }
      if (!grads.all_finite()) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ": non-finite gradient");
      }
      norm_sum += numkit::clip_global_norm(grads, options.clip_norm);
      numkit::adam_step(store, grads, adam);
      ++batches;
    }
    rec.train_loss = total / static_cast<double>(tokens);
    rec.train_nll = nll / static_cast<double>(tokens);
    rec.grad_norm = norm_sum / batches;
    if (!dev_set.empty()) {
      const auto dev = evaluate(params, dev_set);
      rec.dev_loss = dev.loss;
      rec.dev_nll = dev.nll;
    }
    const double score = dev_set.empty() ? -epoch : rec.dev_loss;
    if (score < best_dev) {
      best_dev = score;
      best = store;
      result.best_epoch = epoch;
      rec.best = true;
    }
    bool stop = false;
    if (options.stop_below_nll) {
      rec.clean_train_nll = evaluate(params, train_set).nll;
      stop = *rec.clean_train_nll < *options.stop_below_nll;
    }
    result.log.push_back(rec);
    if (options.on_epoch) options.on_epoch(rec);
    if (stop) {
      result.stopped_early = true;
      break;
    }
  }
  store = best;
  return result;
}

}  // namespace kbgen::model
