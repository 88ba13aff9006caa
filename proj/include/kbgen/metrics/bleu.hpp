// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace kbgen::metrics {

using Tokens = std::vector<std::string>;

struct BleuStats {
  std::vector<long> matches;     // clipped n-gram matches per order
  std::vector<long> candidates;  // hypothesis n-grams per order
  long hyp_length = 0;
  long ref_length = 0;
};

BleuStats bleu_stats(const Tokens& hypothesis, const Tokens& reference, int max_n = 4);

/// Corpus BLEU: clipped counts summed over pairs, geometric mean of the
/// orders that have hypothesis n-grams, brevity penalty exp(1 - r/c) when
/// c < r. Returns 0 when the hypotheses are empty.
double corpus_bleu(const std::vector<Tokens>& hypotheses, const std::vector<Tokens>& references, int max_n = 4);
double bleu(const Tokens& hypothesis, const Tokens& reference, int max_n = 4);

/// Add-one smoothing on orders above 1; for per-example diagnostics.
double sentence_bleu(const Tokens& hypothesis, const Tokens& reference, int max_n = 4);

}  // namespace kbgen::metrics
