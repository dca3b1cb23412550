#include <doctest.h>

#include <cmath>
#include <random>

#include "errors.hpp"
#include "net.hpp"
#include "oracles.hpp"

using namespace lsciml;

TEST_CASE("parameter count") {
  CHECK(MlpSpec{3, {25}, 3, Activation::sigmoid}.param_count() == 178);
  CHECK(MlpSpec{3, {25, 25}, 3, Activation::sigmoid}.param_count() == 828);
  CHECK(MlpSpec{4, {25, 25}, 3, Activation::sigmoid}.param_count() == 853);
  CHECK(MlpSpec{3, {}, 3, Activation::tanh}.param_count() == 12);
  const MlpSpec s{3, {25}, 3, Activation::sigmoid};
  CHECK(init_params(s, 1).size() == 178);
}

TEST_CASE("init is deterministic and seed dependent") {
  const MlpSpec s{};
  CHECK(init_params(s, 7) == init_params(s, 7));
  CHECK(init_params(s, 7) != init_params(s, 8));
}

TEST_CASE("glorot bounds, zero biases, zero mean") {
  const MlpSpec s{3, {25}, 3, Activation::sigmoid};
  const double bound1 = std::sqrt(6.0 / 28.0);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::uint64_t seed = 0; n < 10000; ++seed) {
    const auto th = init_params(s, seed);
    for (std::size_t i = 0; i < 75; ++i) {
      CHECK(std::abs(th[i]) <= bound1);
      sum += th[i];
      ++n;
    }
    for (std::size_t i = 75; i < 100; ++i) CHECK(th[i] == 0.0);
    for (std::size_t i = 175; i < 178; ++i) CHECK(th[i] == 0.0);
  }
  CHECK(std::abs(sum / static_cast<double>(n)) < 0.01);
}

TEST_CASE("zero parameters give zero output") {
  for (auto a : {Activation::sigmoid, Activation::tanh, Activation::relu}) {
    const MlpSpec s{3, {25, 25}, 3, a};
    const std::vector<double> th(s.param_count(), 0.0);
    const auto y = forward(s, th, std::vector<double>{1.0, -2.0, 30.0});
    for (double v : y) CHECK(v == 0.0);
  }
}

TEST_CASE("single sigmoid unit") {
  const MlpSpec s{1, {1}, 1, Activation::sigmoid};
  // w1, b1, w2, b2
  const std::vector<double> th{0.0, 0.0, 2.0, 0.0};
  CHECK(forward(s, th, std::vector<double>{5.0})[0] == 1.0);
}

TEST_CASE("relu clamps negative pre-activations") {
  const MlpSpec s{2, {3}, 1, Activation::relu};
  std::vector<double> th(s.param_count(), 0.0);
  for (int i = 6; i < 9; ++i) th[i] = -1.0;    // hidden biases
  for (int i = 9; i < 12; ++i) th[i] = 4.0;    // output weights
  th[12] = 0.75;                               // output bias
  CHECK(forward(s, th, std::vector<double>{3.0, -1.0})[0] == 0.75);
}

TEST_CASE("forward matches the naive oracle") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  int act = 0;
  for (auto a : {Activation::sigmoid, Activation::tanh, Activation::relu}) {
    const MlpSpec s{4, {7, 5}, 3, a};
    std::vector<double> th(s.param_count());
    for (auto& v : th) v = d(rng);
    const auto naive = oracle::NaiveMlp::unflatten(s.layer_widths(), th, act++);
    for (int k = 0; k < 10; ++k) {
      std::vector<double> x{d(rng) * 10, d(rng) * 10, d(rng) * 10, d(rng)};
      const auto y = forward(s, th, x);
      const auto z = naive(x);
      for (int i = 0; i < 3; ++i) CHECK(y[i] == doctest::Approx(z[i]).epsilon(1e-13));
    }
  }
}

TEST_CASE("hidden activations stay in range") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (auto a : {Activation::sigmoid, Activation::tanh, Activation::relu}) {
    const MlpSpec s{3, {6}, 1, a};
    MlpEvaluator ev(s);
    std::vector<double> th(s.param_count());
    for (auto& v : th) v = d(rng);
    std::vector<double> tape(ev.tape_width()), out(1);
    for (int k = 0; k < 50; ++k) {
      std::vector<double> x{d(rng), d(rng), d(rng)};
      ev.forward(th, x, out, tape);
      for (std::size_t i = 3; i < tape.size(); ++i) {
        if (a == Activation::sigmoid) CHECK((tape[i] > 0.0 && tape[i] < 1.0));
        if (a == Activation::tanh) CHECK((tape[i] > -1.0 && tape[i] < 1.0));
        if (a == Activation::relu) CHECK(tape[i] >= 0.0);
      }
    }
  }
}

TEST_CASE("output is homogeneous in output weights") {
  const MlpSpec s{3, {25, 25}, 3, Activation::tanh};
  auto th = init_params(s, 3);
  const std::size_t out_w = s.param_count() - 3 - 75;
  const std::vector<double> x{0.3, -1.2, 4.0};
  const auto y1 = forward(s, th, x);
  for (std::size_t i = out_w; i < out_w + 75; ++i) th[i] *= 2.0;
  const auto y2 = forward(s, th, x);
  for (int i = 0; i < 3; ++i) CHECK(y2[i] == 2.0 * y1[i]);
}

TEST_CASE("dimension mismatches are contract violations") {
  const MlpSpec s{};
  const auto th = init_params(s, 1);
  CHECK_THROWS_AS(forward(s, th, std::vector<double>{1.0, 2.0}), ContractError);
  CHECK_THROWS_AS(forward(s, std::vector<double>(5), std::vector<double>{1, 2, 3}), ContractError);
  CHECK_THROWS_AS((MlpSpec{0, {3}, 3, Activation::relu}.validate()), ContractError);
  CHECK_THROWS_AS((MlpSpec{3, {0}, 3, Activation::relu}.validate()), ContractError);
  CHECK_THROWS_AS(parse_activation("swish"), ContractError);
}

TEST_CASE("backward matches finite differences of forward") {
  const MlpSpec s{3, {6, 4}, 2, Activation::sigmoid};
  MlpEvaluator ev(s);
  auto th = init_params(s, 11);
  for (auto& v : th) v += 0.05;
  const std::vector<double> x{0.4, -0.7, 1.3};
  const std::vector<double> gy{0.8, -1.1};
  std::vector<double> tape(ev.tape_width()), out(2), gx(3), gth(th.size(), 0.0);
  ev.forward(th, x, out, tape);
  ev.backward(th, tape, gy, gx, gth);
  auto scalar = [&](const std::vector<double>& p, const std::vector<double>& in) {
    const auto y = forward(s, p, in);
    return gy[0] * y[0] + gy[1] * y[1];
  };
  for (std::size_t i = 0; i < th.size(); ++i) {
    const double fd = oracle::central_difference([&](const auto& p) { return scalar(p, x); }, th, i, 1e-6);
    CHECK(gth[i] == doctest::Approx(fd).epsilon(1e-7).scale(1.0));
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const double fd = oracle::central_difference([&](const auto& in) { return scalar(th, in); }, x, i, 1e-6);
    CHECK(gx[i] == doctest::Approx(fd).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("activation names") {
  for (auto a : {Activation::sigmoid, Activation::tanh, Activation::relu})
    CHECK(parse_activation(to_string(a)) == a);
}
