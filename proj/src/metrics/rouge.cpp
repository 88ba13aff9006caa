// SPDX-License-Identifier: Apache-2.0
#include "kbgen/metrics/rouge.hpp"

#include <algorithm>

#include "kbgen/errors.hpp"

namespace kbgen::metrics {

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeL rouge_l(const Tokens& hypothesis, const Tokens& reference, double beta_squared) {
  RougeL out;
  if (hypothesis.empty() || reference.empty()) return out;
  const double lcs = static_cast<double>(lcs_length(hypothesis, reference));
  out.precision = lcs / static_cast<double>(hypothesis.size());
  out.recall = lcs / static_cast<double>(reference.size());
  const double denom = out.recall + beta_squared * out.precision;
  out.f = denom > 0.0 ? (1.0 + beta_squared) * out.precision * out.recall / denom : 0.0;
  return out;
}

double corpus_rouge_l(const std::vector<Tokens>& hypotheses, const std::vector<Tokens>& references,
                      double beta_squared) {
  if (hypotheses.size() != references.size()) throw ShapeError("ROUGE-L needs one reference per hypothesis");
  if (hypotheses.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) sum += rouge_l(hypotheses[i], references[i], beta_squared).f;
  return sum / static_cast<double>(hypotheses.size());
}

}  // namespace kbgen::metrics
