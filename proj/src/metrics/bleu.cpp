// SPDX-License-Identifier: Apache-2.0
#include "kbgen/metrics/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "kbgen/errors.hpp"

namespace kbgen::metrics {

namespace {

std::map<Tokens, long> ngrams(const Tokens& tokens, int n) {
  std::map<Tokens, long> out;
  const auto size = static_cast<int>(tokens.size());
  for (int i = 0; i + n <= size; ++i) ++out[Tokens(tokens.begin() + i, tokens.begin() + i + n)];
  return out;
}

double combine(const BleuStats& s, bool smooth) {
  if (s.hyp_length == 0) return 0.0;
  double log_sum = 0.0;
  int orders = 0;
  for (std::size_t k = 0; k < s.matches.size(); ++k) {
    double m = static_cast<double>(s.matches[k]);
    double c = static_cast<double>(s.candidates[k]);
    if (smooth && k > 0) {
      m += 1.0;
      c += 1.0;
    }
    if (c == 0.0) continue;
    if (m == 0.0) return 0.0;
    log_sum += std::log(m / c);
    ++orders;
  }
  if (orders == 0) return 0.0;
  const double c = static_cast<double>(s.hyp_length);
  const double r = static_cast<double>(s.ref_length);
  const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
  return bp * std::exp(log_sum / orders);
}

}  // namespace

BleuStats bleu_stats(const Tokens& hypothesis, const Tokens& reference, int max_n) {
  if (max_n < 1) throw UsageError("BLEU order must be >= 1");
  BleuStats s;
  s.matches.assign(static_cast<std::size_t>(max_n), 0);
  s.candidates.assign(static_cast<std::size_t>(max_n), 0);
  s.hyp_length = static_cast<long>(hypothesis.size());
  s.ref_length = static_cast<long>(reference.size());
  for (int n = 1; n <= max_n; ++n) {
    const auto hyp = ngrams(hypothesis, n);
    const auto ref = ngrams(reference, n);
    for (const auto& [gram, count] : hyp) {
      s.candidates[static_cast<std::size_t>(n - 1)] += count;
      if (auto it = ref.find(gram); it != ref.end()) s.matches[static_cast<std::size_t>(n - 1)] += std::min(count, it->second);
    }
  }
  return s;
}

double corpus_bleu(const std::vector<Tokens>& hypotheses, const std::vector<Tokens>& references, int max_n) {
  if (hypotheses.size() != references.size()) throw ShapeError("BLEU needs one reference per hypothesis");
  BleuStats total;
  total.matches.assign(static_cast<std::size_t>(max_n), 0);
  total.candidates.assign(static_cast<std::size_t>(max_n), 0);
  for (std::size_t i = 0; i < hypotheses.size(); ++i) {
    const auto s = bleu_stats(hypotheses[i], references[i], max_n);
    for (int k = 0; k < max_n; ++k) {
      total.matches[static_cast<std::size_t>(k)] += s.matches[static_cast<std::size_t>(k)];
      total.candidates[static_cast<std::size_t>(k)] += s.candidates[static_cast<std::size_t>(k)];
    }
    total.hyp_length += s.hyp_length;
    total.ref_length += s.ref_length;
  }
  return combine(total, false);
}

double bleu(const Tokens& hypothesis, const Tokens& reference, int max_n) {
  return corpus_bleu({hypothesis}, {reference}, max_n);
}

double sentence_bleu(const Tokens& hypothesis, const Tokens& reference, int max_n) {
  return combine(bleu_stats(hypothesis, reference, max_n), true);
}

}  // namespace kbgen::metrics
