// SPDX-FileCopyrightText: © 2026 igcl contributors
//
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "igcl/errors.hpp"
#include "igcl/grad_check.hpp"
#include "igcl/params.hpp"
#include "igcl/tensor.hpp"

using namespace igcl;

namespace {

Tensor random_tensor(Shape shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Tensor t = Tensor::zeros(std::move(shape), true);
  for (double& v : t.mutable_data()) v = u(rng);
  return t;
}

// Weighted sum with fixed, non-uniform weights so every output coordinate
// reaches the loss with a distinct coefficient.
Tensor weighted_sum(Tape& tape, const Tensor& y) {
  std::vector<double> w(y.numel());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.3 + 0.17 * static_cast<double>(i % 7);
  return sum(tape, mul(tape, y, Tensor::from(y.shape(), w)));
}

constexpr double kTol = 1e-6;

}  // namespace

TEST_CASE("matmul agrees with a triple loop") {
  const Tensor a = random_tensor({3, 4}, 1), b = random_tensor({4, 5}, 2);
  Tape tape(false);
  const Tensor c = matmul(tape, a, b);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < 4; ++p) acc += a.at(i, p) * b.at(p, j);
      CHECK(c.at(i, j) == doctest::Approx(acc).epsilon(1e-14));
    }
  CHECK_THROWS_AS(matmul(tape, a, a), DimensionError);
}

TEST_CASE("elementwise and matrix ops match central differences") {
  const Tensor other = random_tensor({3, 4}, 11);
  const Tensor right = random_tensor({4, 2}, 12);
  const Tensor bias = random_tensor({4}, 13);
  const Tensor gamma = random_tensor({4}, 14, 0.5, 1.5);
  const Tensor beta = random_tensor({4}, 15);
  const std::size_t picks[] = {2, 0, 2, 1};

  const std::pair<const char*, ScalarFn> cases[] = {
      {"matmul", [&](Tape& t, const Tensor& x) { return weighted_sum(t, matmul(t, x, right)); }},
      {"transpose", [&](Tape& t, const Tensor& x) { return weighted_sum(t, transpose(t, x)); }},
      {"add", [&](Tape& t, const Tensor& x) { return weighted_sum(t, mul(t, add(t, x, other), x)); }},
      {"sub", [&](Tape& t, const Tensor& x) { return weighted_sum(t, mul(t, sub(t, other, x), x)); }},
      {"mul", [&](Tape& t, const Tensor& x) { return weighted_sum(t, mul(t, x, other)); }},
      {"scalar mul",
       [&](Tape& t, const Tensor& x) { return weighted_sum(t, mul(t, x, slice_cols(t, slice_rows(t, x, 0, 1), 0, 1))); }},
      {"add_row", [&](Tape& t, const Tensor& x) { return weighted_sum(t, mul(t, add_row(t, x, bias), x)); }},
      {"scale", [&](Tape& t, const Tensor& x) { return weighted_sum(t, scale(t, x, -2.5)); }},
      {"exp", [&](Tape& t, const Tensor& x) { return weighted_sum(t, exp(t, x)); }},
      {"log", [&](Tape& t, const Tensor& x) { return weighted_sum(t, log(t, add(t, mul(t, x, x), Tensor::scalar(0.5)))); }},
      {"softmax", [&](Tape& t, const Tensor& x) { return weighted_sum(t, softmax_rows(t, x)); }},
      {"log_softmax", [&](Tape& t, const Tensor& x) { return weighted_sum(t, log_softmax_rows(t, x)); }},
      {"sum axis0", [&](Tape& t, const Tensor& x) { return weighted_sum(t, reduce(t, x, 0, ReduceKind::kSum)); }},
      {"mean axis1", [&](Tape& t, const Tensor& x) { return weighted_sum(t, reduce(t, x, 1, ReduceKind::kMean)); }},
      {"max axis0", [&](Tape& t, const Tensor& x) { return weighted_sum(t, reduce(t, x, 0, ReduceKind::kMax)); }},
      {"min axis1", [&](Tape& t, const Tensor& x) { return weighted_sum(t, reduce(t, x, 1, ReduceKind::kMin)); }},
      {"concat",
       [&](Tape& t, const Tensor& x) {
         const Tensor rows[] = {x, other};
         const Tensor cols[] = {x, other};
         return add(t, weighted_sum(t, concat_rows(t, rows)), weighted_sum(t, mul(t, concat_cols(t, cols), concat_cols(t, cols))));
       }},
      {"slice", [&](Tape& t, const Tensor& x) { return weighted_sum(t, slice_cols(t, slice_rows(t, x, 1, 3), 1, 4)); }},
      {"gather", [&](Tape& t, const Tensor& x) { return weighted_sum(t, mul(t, gather_rows(t, x, picks), gather_rows(t, x, picks))); }},
      {"layer_norm", [&](Tape& t, const Tensor& x) { return weighted_sum(t, layer_norm_rows(t, x, gamma, beta)); }},
      {"normalize", [&](Tape& t, const Tensor& x) { return weighted_sum(t, normalize_rows(t, x)); }},
      {"relu", [&](Tape& t, const Tensor& x) { return weighted_sum(t, relu(t, x)); }},
  };
  for (const auto& [name, f] : cases) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      CAPTURE(name);
      CAPTURE(seed);
      CHECK(grad_check(f, random_tensor({3, 4}, 100 + seed)) < kTol);
    }
  }
}

TEST_CASE("grad_check of a plain sum is exact") {
  // Dyadic inputs and a power-of-two step keep every difference exact.
  Tensor x = Tensor::zeros({4, 3}, true);
  for (std::size_t i = 0; i < x.numel(); ++i) x.mutable_data()[i] = static_cast<double>(i) / 8.0 - 0.75;
  CHECK(grad_check([](Tape& t, const Tensor& v) { return sum(t, v); }, x, std::ldexp(1.0, -20)) == 0.0);
}

TEST_CASE("softmax rows sum to one and ignore row shifts") {
  Tape tape(false);
  const Tensor x = random_tensor({4, 6}, 21, -5.0, 5.0);
  const Tensor s = softmax_rows(tape, x);
  Tensor shifted = x.clone();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 6; ++j) shifted.mutable_data()[i * 6 + j] += 10.0 * static_cast<double>(i) - 7.0;
  const Tensor s2 = softmax_rows(tape, shifted);
  for (std::size_t i = 0; i < 4; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < 6; ++j) {
      total += s.at(i, j);
      CHECK(std::abs(s.at(i, j) - s2.at(i, j)) < 1e-12);
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}

TEST_CASE("full max reduction ignores permutations") {
  Tape tape(false);
  std::vector<double> v{0.3, -1.0, 2.5, 2.5, 0.0, 1.0};
  const double ref = reduce(tape, Tensor::from({2, 3}, v), std::nullopt, ReduceKind::kMax).item();
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(v.begin(), v.end(), rng);
    CHECK(reduce(tape, Tensor::from({3, 2}, v), std::nullopt, ReduceKind::kMax).item() == ref);
  }
}

TEST_CASE("backward through independent subgraphs concatenates their gradients") {
  const Tensor a0 = random_tensor({2, 3}, 31), b0 = random_tensor({3, 2}, 32);
  auto grads = [](bool use_a, bool use_b, const Tensor& a_src, const Tensor& b_src) {
    Tensor a = a_src.clone(), b = b_src.clone();
    Tape tape;
    Tensor fa = sum(tape, exp(tape, a));
    Tensor fb = sum(tape, mul(tape, b, b));
    Tensor loss = use_a && use_b ? add(tape, fa, fb) : (use_a ? fa : fb);
    tape.backward(loss);
    std::vector<double> out;
    if (use_a) out.insert(out.end(), a.grad().begin(), a.grad().end());
    if (use_b) out.insert(out.end(), b.grad().begin(), b.grad().end());
    return out;
  };
  auto joint = grads(true, true, a0, b0);
  auto ga = grads(true, false, a0, b0), gb = grads(false, true, a0, b0);
  ga.insert(ga.end(), gb.begin(), gb.end());
  CHECK(joint == ga);
}

TEST_CASE("gamma and beta of layer norm are differentiated") {
  const Tensor x = random_tensor({3, 4}, 5);
  const Tensor beta = random_tensor({4}, 6);
  CHECK(grad_check([&](Tape& t, const Tensor& g) { return weighted_sum(t, layer_norm_rows(t, x, g, beta)); },
                   random_tensor({4}, 7)) < kTol);
}

TEST_CASE("grad_check detects a wrong backward") {
  // y = 2x with a backward that claims dy/dx = 3.
  const ScalarFn wrong = [](Tape& t, const Tensor& x) {
    Tensor y = Tensor::zeros(x.shape());
    auto yd = y.mutable_data();
    for (std::size_t i = 0; i < yd.size(); ++i) yd[i] = 2.0 * x.data()[i];
    if (t.tracks({&x})) {
      t.record(y, [x, y] {
        auto& g = x.grad_buffer();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += 3.0 * y.grad()[i];
      });
    }
    return sum(t, y);
  };
  const auto r = grad_check_detailed(wrong, random_tensor({2, 2}, 3), 1e-6);
  CHECK(r.max_rel_error == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  CHECK(r.checked == 4);
}

TEST_CASE("grad_check rejects out-of-range steps and restores x") {
  const Tensor x = random_tensor({2, 3}, 8);
  const std::vector<double> before(x.data().begin(), x.data().end());
  const ScalarFn f = [](Tape& t, const Tensor& v) { return sum(t, exp(t, v)); };
  CHECK_THROWS_AS(grad_check(f, x, 1e-9), DomainError);
  CHECK_THROWS_AS(grad_check(f, x, 1e-2), DomainError);
  grad_check(f, x, 1e-5);
  CHECK(std::vector<double>(x.data().begin(), x.data().end()) == before);
}

TEST_CASE("closed-form values") {
  Tape tape(false);
  const Tensor x = Tensor::from({1, 3}, {1.0, 2.0, 3.0});
  const Tensor s = softmax_rows(tape, x);
  const double z = std::exp(1.0) + std::exp(2.0) + std::exp(3.0);
  CHECK(s.at(0, 2) == doctest::Approx(std::exp(3.0) / z).epsilon(1e-14));
  CHECK(log_softmax_rows(tape, x).at(0, 0) == doctest::Approx(1.0 - std::log(z)).epsilon(1e-14));
  const Tensor n = normalize_rows(tape, Tensor::from({1, 2}, {3.0, 4.0}));
  CHECK(n.at(0, 0) == doctest::Approx(0.6));
  CHECK(n.at(0, 1) == doctest::Approx(0.8));
  // Softmax survives large logits.
  const Tensor big = softmax_rows(tape, Tensor::from({1, 2}, {1000.0, 0.0}));
  CHECK(big.at(0, 0) == doctest::Approx(1.0));
  const Tensor r = reduce(tape, Tensor::from({2, 2}, {1, 5, 5, 2}), 0, ReduceKind::kMax);
  CHECK(r.shape() == Shape{1, 2});
  CHECK(r.at(0, 0) == 5.0);
}

TEST_CASE("max ties route the gradient to the first index") {
  Tape tape;
  Tensor x = Tensor::from({1, 3}, {2.0, 2.0, 1.0}, true);
  Tensor loss = sum(tape, reduce(tape, x, 1, ReduceKind::kMax));
  tape.backward(loss);
  CHECK(x.grad()[0] == 1.0);
  CHECK(x.grad()[1] == 0.0);
  CHECK(x.grad()[2] == 0.0);
}

TEST_CASE("domain and tape errors") {
  Tape tape;
  CHECK_THROWS_AS(log(tape, Tensor::from({1, 2}, {1.0, 0.0})), DomainError);
  CHECK_THROWS_AS(normalize_rows(tape, Tensor::from({2, 2}, {1.0, 1.0, 0.0, 0.0})), DegenerateEmbeddingError);
  CHECK_THROWS_AS(add(tape, Tensor::zeros({2, 2}), Tensor::zeros({2, 3})), DimensionError);

  Tensor x = Tensor::from({1, 2}, {1.0, 2.0}, true);
  Tensor loss = sum(tape, mul(tape, x, x));
  tape.backward(loss);
  CHECK(x.grad()[1] == doctest::Approx(4.0));
  CHECK_THROWS_AS(tape.backward(loss), TapeError);
  tape.reset();
  x.zero_grad();
  Tensor again = sum(tape, mul(tape, x, x));
  tape.backward(again);
  CHECK(x.grad()[0] == doctest::Approx(2.0));

  Tape other;
  CHECK_THROWS_AS(other.backward(Tensor::scalar(1.0)), TapeError);
  CHECK_THROWS_AS(other.backward(mul(other, x, x)), TapeError);
}

TEST_CASE("gradients accumulate across uses of one tensor") {
  Tape tape;
  Tensor x = Tensor::from({1, 1}, {3.0}, true);
  Tensor y = add(tape, mul(tape, x, x), scale(tape, x, 2.0));
  tape.backward(sum(tape, y));
  CHECK(x.grad()[0] == doctest::Approx(8.0));
}

TEST_CASE("non-recording tapes leave no records") {
  Tape tape(false);
  Tensor x = random_tensor({2, 2}, 4);
  const Tensor y = matmul(tape, x, x);
  CHECK(tape.size() == 0);
  CHECK_FALSE(y.requires_grad());
}

TEST_CASE("parameter store checkpoints round-trip bit-exactly") {
  std::mt19937_64 rng(1);
  ParamStore store;
  store.add_normal("b.w", {3, 2}, 1.0, rng);
  store.add_full("a.scalar", {}, -0.125);
  store.add_normal("c", {5}, 1e-300, rng);
  std::stringstream buf;
  store.save(buf);
  const ParamStore back = ParamStore::load(buf);
  REQUIRE(back.size() == store.size());
  for (const auto& [name, t] : store) {
    CHECK(back.get(name).shape() == t.shape());
    CHECK(std::equal(t.data().begin(), t.data().end(), back.get(name).data().begin()));
  }
  CHECK(store.scalar_count() == 12);
  CHECK_THROWS_AS(store.get("missing"), ConfigError);
  CHECK_THROWS_AS(store.add("c", {1}), ConfigError);
  std::stringstream junk("not a checkpoint");
  CHECK_THROWS_AS(ParamStore::load(junk), DataError);
}

TEST_CASE("deep copies are independent") {
  std::mt19937_64 rng(2);
  ParamStore store;
  store.add_normal("w", {2, 2}, 1.0, rng);
  ParamStore copy = store.deep_copy();
  copy.get("w").mutable_data()[0] += 1.0;
  CHECK(copy.get("w").data()[0] != store.get("w").data()[0]);
  store.assign_values(copy);
  CHECK(copy.get("w").data()[0] == store.get("w").data()[0]);
}

TEST_CASE("mix_seed is deterministic and stream-sensitive") {
  CHECK(mix_seed(1, 2) == mix_seed(1, 2));
  CHECK(mix_seed(1, 2) != mix_seed(1, 3));
  CHECK(mix_seed(1, 2) != mix_seed(2, 2));
}

TEST_CASE("single-element matrices keep their shape against scalars") {
  Tape tape(false);
  const Tensor m = Tensor::from({1, 1}, {3.0});
  const Tensor s = Tensor::scalar(2.0);
  CHECK(mul(tape, m, s).shape() == Shape{1, 1});
  CHECK(mul(tape, s, m).shape() == Shape{1, 1});
  CHECK(add(tape, s, m).shape() == Shape{1, 1});
  CHECK(sub(tape, m, s).item() == 1.0);
}
