// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "doctest.h"
#include "kbgen/corpus/corpus.hpp"
#include "kbgen/corpus/synth.hpp"
#include "kbgen/corpus/text.hpp"
#include "kbgen/errors.hpp"
#include "kbgen/inference/generations.hpp"
#include "kbgen/metrics/bleu.hpp"
#include "kbgen/metrics/reconstruction.hpp"
#include "kbgen/metrics/report.hpp"
#include "kbgen/metrics/rouge.hpp"
#include "kbgen/numkit/rng.hpp"

using namespace kbgen;
using namespace kbgen::metrics;

namespace {

Tokens words(const std::string& s) { return corpus::tokenize_words(s); }

// Independent BLEU: n-grams keyed by space-joined strings, single pair.
double naive_bleu(const Tokens& h, const Tokens& r) {
  auto grams = [](const Tokens& t, std::size_t n) {
    std::map<std::string, int> out;
    for (std::size_t i = 0; i + n <= t.size(); ++i) {
      std::string key;
      for (std::size_t k = 0; k < n; ++k) key += t[i + k] + "\x1f";
      ++out[key];
    }
    return out;
  };
  double log_p = 0.0;
  int orders = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    auto hg = grams(h, n), rg = grams(r, n);
    int m = 0, c = 0;
    for (auto& [k, v] : hg) {
      c += v;
      m += std::min(v, rg[k]);
    }
    if (c == 0) continue;
    if (m == 0) return 0.0;
    log_p += std::log(double(m) / c);
    ++orders;
  }
  if (orders == 0) return 0.0;
  const double bp = h.size() < r.size() ? std::exp(1.0 - double(r.size()) / double(h.size())) : 1.0;
  return bp * std::exp(log_p / orders);
}

// Longest common subsequence by enumerating every subsequence of `a`.
std::size_t brute_lcs(const Tokens& a, const Tokens& b) {
  std::size_t best = 0;
  for (unsigned mask = 0; mask < (1u << a.size()); ++mask) {
    Tokens sub;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (mask & (1u << i)) sub.push_back(a[i]);
    }
    std::size_t j = 0;
    for (const auto& t : b) {
      if (j < sub.size() && sub[j] == t) ++j;
    }
    if (j == sub.size()) best = std::max(best, sub.size());
  }
  return best;
}

corpus::KnowledgeBase kb_of(std::vector<corpus::SlotInput> slots) { return corpus::make_kb("e", slots); }

corpus::Example fixture_gold() {
  auto all = corpus::load_corpus(std::string(KBGEN_FIXTURE_DIR) + "/figure2_gold.jsonl");
  REQUIRE(all.size() == 1);
  return all.front();
}

}  // namespace

TEST_CASE("reconstruction scores from the caption counts") {
  const auto r = score_reconstruction(Counts{7, 6, 11}, Counts{7, 5, 9});
  // Hand values: 6/7, 6/11, 2PR/(P+R) = 12/18; 5/7, 5/9, 10/16.
  CHECK(std::abs(r.overall.precision * 100 - 85.7) < 0.05);
  CHECK(std::abs(r.overall.recall * 100 - 54.5) < 0.05);
  CHECK(std::abs(r.overall.f1 * 100 - 66.7) < 0.05);
  CHECK(std::abs(r.interdependent.precision * 100 - 71.4) < 0.05);
  CHECK(std::abs(r.interdependent.recall * 100 - 55.6) < 0.05);
  CHECK(std::abs(r.interdependent.f1 * 100 - 62.5) < 0.05);
  CHECK(r.overall.f1 == doctest::Approx(12.0 / 18.0).epsilon(1e-12));
  CHECK(r.interdependent.f1 == doctest::Approx(10.0 / 16.0).epsilon(1e-12));
}

TEST_CASE("perfect, empty and inconsistent counts") {
  const auto perfect = score(Counts{4, 4, 4});
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f1 == 1.0);
  const auto none = score(Counts{0, 0, 5});
  CHECK(none.no_predictions);
  CHECK(none.precision == 0.0);
  CHECK(none.f1 == 0.0);
  CHECK_THROWS_AS(score(Counts{2, 3, 5}), DataError);
  CHECK_THROWS_AS(score(Counts{5, 3, 2}), DataError);
}

TEST_CASE("adding a correct pair never lowers recall; adding a wrong one never raises precision") {
  numkit::Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const long gold = 1 + rng.between(0, 20);
    const long correct = rng.between(0, static_cast<int>(gold - 1));
    const long predicted = correct + rng.between(0, 10);
    const auto base = score(Counts{predicted, correct, gold});
    const auto more_right = score(Counts{predicted + 1, correct + 1, gold});
    const auto more_wrong = score(Counts{predicted + 1, correct, gold});
    CHECK(more_right.recall >= base.recall);
    CHECK(more_wrong.precision <= base.precision);
  }
}

TEST_CASE("one-row KB described in one sentence") {
  const auto kb = kb_of({{"Member of sports team", "Haifa FC", 1}, {"Matches played", "22", 1}});
  const auto rec = reconstruct("He played for Haifa FC , appearing in 22 matches .", kb);
  REQUIRE(rec.pairs.size() == 2);
  CHECK(rec.pairs[0].slot_type == "Member of sports team");
  CHECK(rec.pairs[1].slot_type == "Matches played");
  REQUIRE(rec.rows.size() == 1);
  CHECK(rec.rows[0].complete);
  const auto r = score_reconstruction(rec, kb);
  CHECK(r.overall.f1 == 1.0);
  CHECK(r.interdependent.f1 == 1.0);
}

TEST_CASE("values split across sentences do not make a row") {
  const auto kb = kb_of({{"Member of sports team", "Haifa FC", 1}, {"Matches played", "22", 1}});
  const auto rec = reconstruct("He played for Haifa FC . He appeared in 22 matches .", kb);
  const auto r = score_reconstruction(rec, kb);
  CHECK(r.overall_counts.correct == 2);
  CHECK(r.interdependent_counts.predicted == 2);
  CHECK(r.interdependent_counts.correct == 0);
}

TEST_CASE("a repeated value is counted once and penalized") {
  const auto kb = kb_of({{"Instance of", "gecko", 1}, {"Endemic to", "Madagascar", 2}});
  const auto rec = reconstruct(
      "Uroplatus ebenaui is a of gecko endemic to Madagascar . The Uroplatus is a member of the species of the genus "
      "Madagascar .",
      kb);
  CHECK(rec.redundant == 1);
  const auto r = score_reconstruction(rec, kb);
  CHECK(r.overall_counts.correct == 2);
  CHECK(r.overall_counts.predicted == 3);
  CHECK(r.overall.precision == doctest::Approx(2.0 / 3.0));
  CHECK(r.redundant == 1);
}

TEST_CASE("empty text predicts nothing") {
  const auto kb = kb_of({{"Name", "Ann", 1}});
  const auto rec = reconstruct("", kb);
  CHECK(rec.pairs.empty());
  const auto r = score_reconstruction(rec, kb);
  CHECK(r.overall.no_predictions);
  CHECK(r.overall.f1 == 0.0);
}

TEST_CASE("matching ignores case, spacing and trailing punctuation") {
  const auto kb = kb_of({{"Award", "Golden Boot.", 1}});
  const auto rec = reconstruct("she won the golden   BOOT twice", kb);
  REQUIRE(rec.pairs.size() == 1);
  CHECK(rec.pairs[0].slot_value == "Golden Boot.");
}

TEST_CASE("shared value strings fill gold slots in KB order") {
  const auto kb = kb_of({{"Member of sports team", "Lyon FC", 1},
                         {"Matches played", "22", 1},
                         {"Member of sports team", "Graz FC", 2},
                         {"Goals scored", "22", 2}});
  const auto one = reconstruct("he played for Lyon FC , appearing in 22 matches .", kb);
  REQUIRE(one.pairs.size() == 2);
  CHECK(one.pairs[1].slot_type == "Matches played");
  CHECK(one.pairs[1].row == 1);
  const auto two = reconstruct("Lyon FC , 22 matches . then Graz FC , 22 goals . again 22 .", kb);
  REQUIRE(two.pairs.size() == 5);
  CHECK(two.pairs[3].slot_type == "Goals scored");
  CHECK(two.pairs[4].redundant);
  const auto r = score_reconstruction(two, kb);
  CHECK(r.overall_counts.correct == 4);
  CHECK(r.interdependent_counts.correct == 2);
}

TEST_CASE("reconstruction is deterministic and independent of the order of distinct gold values") {
  const auto data = corpus::synth_corpus(20, 5, corpus::person_schema());
  for (const auto& ex : data) {
    const auto a = score_reconstruction(reconstruct(ex.reference_text, ex.kb), ex.kb);
    const auto b = score_reconstruction(reconstruct(ex.reference_text, ex.kb), ex.kb);
    CHECK(a.to_json() == b.to_json());
    // Reverse the rows: values are distinct, so the counts must not move.
    std::vector<corpus::SlotInput> reversed;
    const int rows = ex.kb.row_count();
    for (auto it = ex.kb.triples.rbegin(); it != ex.kb.triples.rend(); ++it) {
      reversed.push_back({it->slot_type, it->slot_value, rows - it->row + 1});
    }
    std::stable_sort(reversed.begin(), reversed.end(), [](const auto& x, const auto& y) { return x.row < y.row; });
    const auto kb2 = corpus::make_kb(ex.kb.entity_id, reversed);
    const auto c = score_reconstruction(reconstruct(ex.reference_text, kb2), kb2);
    CHECK(c.overall_counts.predicted == a.overall_counts.predicted);
    CHECK(c.overall_counts.correct == a.overall_counts.correct);
    CHECK(c.interdependent_counts.correct == a.interdependent_counts.correct);
  }
}

TEST_CASE("synthetic references reconstruct their own KB completely") {
  const auto data = corpus::synth_corpus(100, 3, corpus::person_schema());
  std::vector<Output> outs;
  for (const auto& ex : data) outs.push_back({ex.kb.entity_id, ex.reference_text});
  const auto report = evaluate(outs, data);
  CHECK(report.bleu == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.rouge_l == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.reconstruction.overall.recall == 1.0);
  CHECK(report.reconstruction.interdependent.recall == 1.0);
  CHECK(report.reconstruction.overall.precision == 1.0);
}

TEST_CASE("fixture file reproduces the caption scores") {
  const auto gold = fixture_gold();
  CHECK(gold.kb.size() == 11);
  CHECK(gold.kb.row_count() == 9);
  const auto gens = inference::read_generations(std::string(KBGEN_FIXTURE_DIR) + "/figure2_generations.jsonl");
  REQUIRE(gens.size() == 1);
  const auto report = evaluate({{gens[0].entity_id, gens[0].output}}, {gold});
  const auto& r = report.reconstruction;
  CHECK(r.overall_counts.predicted == 7);
  CHECK(r.overall_counts.correct == 6);
  CHECK(r.overall_counts.gold == 11);
  CHECK(r.interdependent_counts.predicted == 7);
  CHECK(r.interdependent_counts.correct == 5);
  CHECK(r.interdependent_counts.gold == 9);
}

TEST_CASE("evaluation of an empty generation set") {
  const auto data = corpus::synth_corpus(5, 2, corpus::person_schema());
  const auto report = evaluate({}, data);
  CHECK(report.empty_generations);
  CHECK(report.missing == 5);
  CHECK(report.bleu == 0.0);
  CHECK(report.rouge_l == 0.0);
  CHECK(report.reconstruction.overall.f1 == 0.0);
  CHECK(report.reconstruction.overall.no_predictions);
  CHECK_THROWS_AS(evaluate({{"nobody", "x"}}, data), DataError);
}

TEST_CASE("BLEU hand-computed fixture") {
  // Precisions 3/3, 2/2, 1/1 (no 4-grams in the hypothesis), BP = exp(1 - 4/3).
  const double expected = std::exp(1.0 - 4.0 / 3.0);
  CHECK(expected == doctest::Approx(0.7165).epsilon(1e-4));
  CHECK(bleu(words("the cat sat"), words("the cat sat down")) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(std::abs(bleu(words("the cat sat"), words("the cat sat down")) - 0.7165) < 1e-4);
}

TEST_CASE("BLEU identity, disjoint and empty") {
  CHECK(bleu(words("a b c d e"), words("a b c d e")) == 1.0);
  CHECK(bleu(words("a b c"), words("x y z")) == 0.0);
  CHECK(bleu({}, words("a b")) == 0.0);
  CHECK(corpus_bleu({}, {}) == 0.0);
  CHECK(sentence_bleu(words("a b c"), words("a b c")) == 1.0);
}

TEST_CASE("BLEU agrees with an independent count on random pairs") {
  numkit::Rng rng(4);
  const std::vector<std::string> alphabet{"a", "b", "c", "d"};
  for (int trial = 0; trial < 300; ++trial) {
    Tokens h, r;
    const int hl = rng.between(0, 9), rl = rng.between(1, 9);
    for (int i = 0; i < hl; ++i) h.push_back(rng.pick(alphabet));
    for (int i = 0; i < rl; ++i) r.push_back(rng.pick(alphabet));
    CHECK(bleu(h, r) == doctest::Approx(naive_bleu(h, r)).epsilon(1e-12));
  }
}

TEST_CASE("ROUGE-L closed form and LCS oracle") {
  const auto r = rouge_l(words("a b d"), words("a b c d"));
  CHECK(brute_lcs(words("a b d"), words("a b c d")) == 3);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 0.75);
  const double b2 = 1.44, p = 1.0, rec = 0.75;
  CHECK(r.f == doctest::Approx((1 + b2) * p * rec / (rec + b2 * p)).epsilon(1e-12));
  CHECK(rouge_l(words("x y"), words("x y")).f == 1.0);
  CHECK(rouge_l(words("x y"), words("p q")).f == 0.0);

  numkit::Rng rng(9);
  const std::vector<std::string> alphabet{"a", "b", "c"};
  for (int trial = 0; trial < 200; ++trial) {
    Tokens x, y;
    for (int i = 0, n = rng.between(0, 10); i < n; ++i) x.push_back(rng.pick(alphabet));
    for (int i = 0, n = rng.between(0, 10); i < n; ++i) y.push_back(rng.pick(alphabet));
    CHECK(lcs_length(x, y) == brute_lcs(x, y));
  }
}

TEST_CASE("corpus scores are symmetric under reordering the pairs") {
  std::vector<Tokens> hyps{words("a b c"), words("d e"), words("f g h i"), words("a a b")};
  std::vector<Tokens> refs{words("a b c d"), words("d e f"), words("f g x i"), words("a b")};
  const double b = corpus_bleu(hyps, refs), rl = corpus_rouge_l(hyps, refs);
  std::vector<std::size_t> perm{2, 0, 3, 1};
  std::vector<Tokens> h2, r2;
  for (auto i : perm) {
    h2.push_back(hyps[i]);
    r2.push_back(refs[i]);
  }
  CHECK(corpus_bleu(h2, r2) == doctest::Approx(b).epsilon(1e-15));
  CHECK(corpus_rouge_l(h2, r2) == doctest::Approx(rl).epsilon(1e-15));
}
