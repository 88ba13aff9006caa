// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "kbgen/corpus/types.hpp"
#include "kbgen/metrics/reconstruction.hpp"

namespace kbgen::metrics {

struct ExampleScore {
  std::string entity_id;
  double sentence_bleu = 0.0;
  double rouge_l = 0.0;
  ReconstructionReport reconstruction;
  bool missing = false;  // no generation for this entity
};

struct EvaluationReport {
  long examples = 0;
  long missing = 0;
  bool empty_generations = false;
  double bleu = 0.0;
  double rouge_l = 0.0;
  ReconstructionReport reconstruction;  // counts summed over examples
  std::vector<ExampleScore> per_example;

  nlohmann::json to_json() const;
};

struct Output {
  std::string entity_id;
  std::string text;
};

/// Scores outputs against the gold examples, in gold order. A gold entity
/// with no output is scored as an empty output. Throws DataError on an
/// output whose entity is not in the gold set, or a duplicate entity.
EvaluationReport evaluate(const std::vector<Output>& outputs, const std::vector<corpus::Example>& gold);

}  // namespace kbgen::metrics
