// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "kbgen/metrics/bleu.hpp"

namespace kbgen::metrics {

inline constexpr double kRougeBetaSquared = 1.44;

std::size_t lcs_length(const Tokens& a, const Tokens& b);

struct RougeL {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

/// LCS precision against the hypothesis length, recall against the
/// reference length, F = (1 + b2) P R / (R + b2 P).
RougeL rouge_l(const Tokens& hypothesis, const Tokens& reference, double beta_squared = kRougeBetaSquared);

/// Mean per-pair F.
double corpus_rouge_l(const std::vector<Tokens>& hypotheses, const std::vector<Tokens>& references,
                      double beta_squared = kRougeBetaSquared);

}  // namespace kbgen::metrics
