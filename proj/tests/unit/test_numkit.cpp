#include "doctest.h"

#include <cmath>
#include <vector>

#include "kbgen/numkit/adam.hpp"
#include "kbgen/numkit/gradcheck.hpp"
#include "kbgen/numkit/kernels.hpp"
#include "kbgen/numkit/rng.hpp"
#include "kbgen/numkit/tape.hpp"

using namespace kbgen;
using namespace kbgen::numkit;
using Mat = Matrix<double>;
using Vec = Vector<double>;

namespace {

Mat random_matrix(Rng& rng, Index r, Index c, double scale = 1.0) {
  Mat m(r, c);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-scale, scale);
  return m;
}

double scalar_sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Step-by-step GRU evaluation, one scalar at a time.
std::vector<double> gru_oracle(const std::vector<double>& x, const std::vector<double>& h,
                               const std::vector<Mat>& w) {
  const std::size_t H = h.size(), D = x.size();
  auto affine = [&](const Mat& W, const Mat& U, const Mat& b, const std::vector<double>& hh, std::size_t i) {
    double s = b(static_cast<Index>(i), 0);
    for (std::size_t k = 0; k < D; ++k) s += W(static_cast<Index>(i), static_cast<Index>(k)) * x[k];
    for (std::size_t k = 0; k < H; ++k) s += U(static_cast<Index>(i), static_cast<Index>(k)) * hh[k];
    return s;
  };
  std::vector<double> z(H), r(H), rh(H), out(H);
  for (std::size_t i = 0; i < H; ++i) z[i] = scalar_sigmoid(affine(w[0], w[1], w[2], h, i));
  for (std::size_t i = 0; i < H; ++i) r[i] = scalar_sigmoid(affine(w[3], w[4], w[5], h, i));
  for (std::size_t i = 0; i < H; ++i) rh[i] = r[i] * h[i];
  for (std::size_t i = 0; i < H; ++i) {
    const double n = std::tanh(affine(w[6], w[7], w[8], rh, i));
    out[i] = z[i] * h[i] + (1.0 - z[i]) * n;
  }
  return out;
}

struct GruFixture {
  ParamStore<double> store;
  std::vector<ParamId> ids;
  GruFixture(Index input, Index hidden, Rng& rng, double scale) {
    const char* names[] = {"W_z", "U_z", "b_z", "W_r", "U_r", "b_r", "W_n", "U_n", "b_n"};
    for (int g = 0; g < 3; ++g) {
      ids.push_back(store.add(names[3 * g], hidden, input));
      ids.push_back(store.add(names[3 * g + 1], hidden, hidden));
      ids.push_back(store.add(names[3 * g + 2], hidden, 1));
    }
    store.init_uniform(rng, scale);
  }
  GruWeights<double> weights() const {
    return {store[ids[0]], store[ids[1]], store[ids[2]], store[ids[3]], store[ids[4]],
            store[ids[5]], store[ids[6]], store[ids[7]], store[ids[8]]};
  }
  GruVars<double> vars(Tape<double>& t) const {
    return {t.param(ids[0]), t.param(ids[1]), t.param(ids[2]), t.param(ids[3]), t.param(ids[4]),
            t.param(ids[5]), t.param(ids[6]), t.param(ids[7]), t.param(ids[8])};
  }
};

}  // namespace

TEST_CASE("softmax examples") {
  Vec a(2);
  a << 0, 0;
  auto p = softmax(a);
  CHECK(p(0) == doctest::Approx(0.5));
  CHECK(p(1) == doctest::Approx(0.5));

  Vec big(3);
  big << 1000, 1000, 1000;
  p = softmax(big);
  for (Index i = 0; i < 3; ++i) CHECK(p(i) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  Vec v(3);
  v << 1, 2, 3;
  p = softmax(v);
  // e^x / sum e^x evaluated by hand.
  CHECK(std::abs(p(0) - 0.09003057) < 1e-6);
  CHECK(std::abs(p(1) - 0.24472847) < 1e-6);
  CHECK(std::abs(p(2) - 0.66524096) < 1e-6);
}

TEST_CASE("softmax mask and degenerate input") {
  Vec v(3);
  v << 5, 1, 2;
  std::vector<bool> mask{false, true, true};
  auto p = softmax(v, &mask);
  CHECK(p(0) == 0.0);
  CHECK(std::abs(p.sum() - 1.0) < 1e-12);

  std::vector<bool> none{false, false, false};
  CHECK_THROWS_WITH_AS(softmax(v, &none), doctest::Contains("degenerate softmax"), NumericError);
  CHECK_THROWS_WITH_AS(softmax(Vec(0)), doctest::Contains("degenerate softmax"), NumericError);
}

TEST_CASE("softmax properties over random logits") {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.below(12));
    Vec x(n);
    for (Index i = 0; i < n; ++i) x(i) = rng.uniform(-300, 300);
    const auto p = softmax(x);
    CHECK((p.array() >= 0).all());
    CHECK(std::abs(p.sum() - 1.0) < 1e-9);
    const double shift = rng.uniform(-1e3, 1e3);
    const auto q = softmax((x.array() + shift).matrix().eval());
    CHECK((p - q).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("sigmoid and tanh identities") {
  CHECK(sigmoid(0.0) == 0.5);
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform(-20, 20);
    CHECK(std::abs(std::tanh(-x) + std::tanh(x)) < 1e-12);
    CHECK(std::abs(sigmoid(x) + sigmoid(-x) - 1.0) < 1e-12);
  }
}

TEST_CASE("gru_cell zero cases") {
  Rng rng(5);
  GruFixture zero(3, 4, rng, 0.0);
  Vec x = Vec::Zero(3), h = Vec::Zero(4);
  CHECK(gru_cell(x, h, zero.weights()).isZero(0.0));

  GruFixture f(3, 4, rng, 0.5);
  for (int g : {6, 7, 8}) f.store[f.ids[static_cast<std::size_t>(g)]].setZero();
  x = random_matrix(rng, 3, 1, 2.0);
  CHECK(gru_cell(x, h, f.weights()).isZero(0.0));
}

TEST_CASE("gru_cell matches scalar oracle") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    GruFixture f(3, 3, rng, 0.8);
    Vec x = random_matrix(rng, 3, 1, 1.5), h = random_matrix(rng, 3, 1, 0.9);
    std::vector<Mat> w;
    for (auto id : f.ids) w.push_back(f.store[id]);
    const auto expected = gru_oracle({x(0), x(1), x(2)}, {h(0), h(1), h(2)}, w);
    const auto got = gru_cell(x, h, f.weights());
    for (Index i = 0; i < 3; ++i) CHECK(std::abs(got(i) - expected[static_cast<std::size_t>(i)]) < 1e-14);
    CHECK((got.array().abs() < 1.0).all());
  }
}

TEST_CASE("gru_cell rejects mismatched shapes with both shapes in the message") {
  Rng rng(1);
  GruFixture f(3, 4, rng, 0.1);
  Vec x = Vec::Zero(5), h = Vec::Zero(4);
  CHECK_THROWS_WITH_AS(gru_cell(x, h, f.weights()), doctest::Contains("(5x1)"), ShapeError);
  CHECK_THROWS_WITH_AS(gru_cell(x, h, f.weights()), doctest::Contains("(4x3)"), ShapeError);
}

TEST_CASE("tape gru_cell agrees with plain gru_cell") {
  Rng rng(23);
  GruFixture f(4, 3, rng, 0.7);
  Vec x = random_matrix(rng, 4, 1), h = random_matrix(rng, 3, 1, 0.9);
  Tape<double> tape(&f.store);
  auto out = gru_cell(tape.constant(x), tape.constant(h), f.vars(tape));
  CHECK((out.value() - gru_cell(x, h, f.weights())).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("backward of a linear map") {
  ParamStore<double> store;
  const auto W = store.add("W", 2, 3);
  const auto unused = store.add("unused", 2, 2);
  Rng rng(2);
  store.init_uniform(rng, 1.0);
  Vec x(3);
  x << 1.5, -2.0, 0.25;
  Tape<double> tape(&store);
  auto loss = sum(matmul(tape.param(W), tape.constant(x)));
  auto grads = tape.backward(loss);
  Mat expected(2, 3);
  expected << 1.5, -2.0, 0.25, 1.5, -2.0, 0.25;
  CHECK((grads[W] - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK(grads[unused].isZero(0.0));
}

TEST_CASE("backward of softmax cross-entropy equals p - onehot") {
  ParamStore<double> store;
  const auto z = store.add("z", 3, 1);
  store[z] << 0.3, -1.2, 2.0;
  Tape<double> tape(&store);
  auto p = softmax_cols(tape.param(z));
  auto loss = scale(log(pick(p, {1})), -1.0);
  auto grads = tape.backward(loss);
  const Vec probs = softmax(store[z]);
  Vec expected = probs;
  expected(1) -= 1.0;
  CHECK((grads[z] - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("backward rejects a non-scalar loss") {
  ParamStore<double> store;
  const auto w = store.add("w", 2, 1);
  Tape<double> tape(&store);
  auto v = tanh(tape.param(w));
  CHECK_THROWS_AS(tape.backward(v), ShapeError);
}

TEST_CASE("every primitive passes a finite-difference check") {
  ParamStore<double> store;
  const auto A = store.add("A", 3, 4);
  const auto B = store.add("B", 4, 2);
  const auto c = store.add("c", 3, 1);
  const auto T = store.add("T", 5, 3);
  Rng rng(31);
  store.init_uniform(rng, 0.9);
  const Index rows[] = {4, 0, 4};
  auto build = [&](Tape<double>& t) {
    auto a = t.param(A);
    auto ab = matmul(a, t.param(B));                        // 3x2
    auto shifted = add_col(ab, t.param(c));                 // 3x2
    auto act = mul(tanh(shifted), sigmoid(sub(ab, shifted)));
    auto probs = softmax_cols(act);
    auto emb = t.param_rows(T, rows);                       // 3x3
    auto stacked = concat_cols<double>({probs, slice_cols(emb, 0, 2)});
    auto both = concat_rows<double>({stacked, slice_rows(one_minus(stacked), 1, 2)});
    auto m = min(both, scale(transpose(transpose(both)), 0.7));
    auto picked = pick(softmax_cols(both), {0, 2, -1, 4});
    return add(sum(m), sum(log(add(picked, t.constant(Mat::Constant(1, 4, 0.1))))));
  };
  auto report = gradient_check<double>(store, build, 1e-5, 1e-6);
  for (const auto& e : report.entries) {
    INFO(e.name);
    // Some entries of T have an exact zero gradient; there the difference
    // quotient is pure rounding, so bound absolute error as well.
    CHECK(e.group_relative_error < 1e-6);
    CHECK(e.max_abs_error < 1e-9);
  }
}

TEST_CASE("composite GRU step loss matches finite differences") {
  Rng rng(41);
  GruFixture f(3, 4, rng, 0.6);
  Vec x = random_matrix(rng, 3, 1), h = random_matrix(rng, 4, 1, 0.8);
  auto build = [&](Tape<double>& t) {
    auto vars = f.vars(t);
    auto h1 = gru_cell(t.constant(x), t.constant(h), vars);
    auto h2 = gru_cell(t.constant(x), h1, vars);
    return sum(mul(h2, h2));
  };
  auto report = gradient_check<double>(f.store, build, 1e-5, 1e-4);
  CHECK(report.passed());
  CHECK(report.max_relative_error() < 1e-6);
}

TEST_CASE("gradient_check on a quadratic is essentially exact") {
  ParamStore<double> store;
  const auto theta = store.add("theta", 4, 3);
  Rng rng(9);
  store.init_uniform(rng, 2.0);
  auto build = [&](Tape<double>& t) {
    auto p = t.param(theta);
    return sum(mul(p, p));
  };
  auto report = gradient_check<double>(store, build, 1e-5, 1e-8);
  CHECK(report.max_relative_error() < 1e-8);
  CHECK(report.passed());
}

TEST_CASE("gradient_check detects a non-deterministic closure") {
  ParamStore<double> store;
  const auto theta = store.add("theta", 2, 1);
  store[theta].setConstant(1.0);
  int calls = 0;
  auto build = [&](Tape<double>& t) {
    ++calls;
    return sum(scale(t.param(theta), static_cast<double>(calls)));
  };
  CHECK_THROWS_AS(gradient_check<double>(store, build, 1e-5, 1e-4), NumericError);
}

TEST_CASE("adam: zero gradient leaves parameters fixed and decays moments") {
  ParamStore<double> store;
  const auto p = store.add("p", 2, 2);
  Rng rng(4);
  store.init_uniform(rng, 1.0);
  const Mat before = store[p];
  AdamState<double> state(store);
  state.first_moment[0].setConstant(0.5);
  state.second_moment[0].setConstant(0.25);
  GradientSet<double> zero(store);
  // Zero moments as well: parameters must not move at all.
  AdamState<double> fresh(store);
  for (int i = 0; i < 10; ++i) adam_step(store, zero, fresh);
  CHECK((store[p] - before).cwiseAbs().maxCoeff() == 0.0);
  CHECK(fresh.step == 10);

  adam_step(store, zero, state);
  CHECK(state.first_moment[0](0, 0) == doctest::Approx(0.45));
  CHECK(state.second_moment[0](0, 0) == doctest::Approx(0.25 * 0.999));
}

TEST_CASE("adam: first step on a unit gradient moves by the learning rate") {
  ParamStore<double> store;
  const auto p = store.add("p", 1, 1);
  store[p](0, 0) = 1.0;
  AdamState<double> state(store, 0.001);
  GradientSet<double> g(store);
  g[p](0, 0) = 1.0;
  adam_step(store, g, state);
  // m_hat = 1, v_hat = 1: delta = lr / (1 + eps)
  CHECK(std::abs((1.0 - store[p](0, 0)) - 0.001 / (1.0 + 1e-8)) < 1e-15);
  CHECK(state.step == 1);
}

TEST_CASE("adam: constant gradient gives monotone movement against the gradient") {
  ParamStore<double> store;
  const auto p = store.add("p", 1, 1);
  AdamState<double> state(store, 0.01);
  GradientSet<double> g(store);
  g[p](0, 0) = 0.3;
  double prev = store[p](0, 0);
  for (int i = 0; i < 100; ++i) {
    adam_step(store, g, state);
    CHECK(store[p](0, 0) < prev);
    prev = store[p](0, 0);
  }
  // With a constant gradient the bias-corrected ratio is exactly 1 each step.
  CHECK(prev == doctest::Approx(-100 * 0.01).epsilon(1e-6));
}

TEST_CASE("adam rejects mismatched shapes") {
  ParamStore<double> a, b;
  a.add("p", 2, 2);
  b.add("p", 3, 2);
  AdamState<double> state(a);
  GradientSet<double> g(b);
  CHECK_THROWS_AS(adam_step(a, g, state), ShapeError);
}

TEST_CASE("global norm clipping") {
  ParamStore<double> store;
  const auto p = store.add("p", 1, 2);
  GradientSet<double> g(store);
  g[p] << 3.0, 4.0;
  CHECK(clip_global_norm(g, 2.0) == doctest::Approx(5.0));
  CHECK(g.norm() == doctest::Approx(2.0));
}

TEST_CASE("tensor invariants") {
  CHECK_THROWS_AS(Tensor<double>({2, 2}, {1, 2, 3}), ShapeError);
  CHECK_THROWS_AS(Tensor<double>({2}, {1, std::nan("")}), NumericError);
  Tensor<double> t({2, 3}, {1, 2, 3, 4, 5, 6});
  const auto m = t.to_matrix();
  CHECK(m(1, 0) == 4.0);
  CHECK(Tensor<double>::from_matrix(m).data() == t.data());
}

TEST_CASE("rng is deterministic and splittable") {
  Rng a(99), b(99);
  for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng child = a.split();
  Rng child2 = b.split();
  CHECK(child.next_u64() == child2.next_u64());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const int k = a.between(3, 7);
    CHECK(k >= 3);
    CHECK(k <= 7);
  }
}

TEST_CASE("single precision mode compiles and agrees loosely") {
  Vector<float> v(3);
  v << 1.f, 2.f, 3.f;
  const auto p = softmax(v);
  CHECK(std::abs(p(2) - 0.66524096f) < 1e-6f);
}
