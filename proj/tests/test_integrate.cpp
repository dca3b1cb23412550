#include <doctest.h>

#include <cmath>
#include <limits>

#include "dynamics.hpp"
#include "errors.hpp"
#include "integrate.hpp"
#include "oracles.hpp"

using namespace lsciml;

namespace {

State3 decay(double, const State3& u) { return {-u[0], -u[1], -u[2]}; }

}  // namespace

TEST_CASE("one rk4 step of exponential decay") {
  const auto u = rk4_step(decay, {1, 1, 1}, 0.0, 0.1);
  for (double v : u) {
    CHECK(v == doctest::Approx(0.9048375).epsilon(1e-7));
    CHECK(v == doctest::Approx(oracle::rk4_decay(0.1, 1)).epsilon(1e-15));
  }
  CHECK(std::abs(u[0] - std::exp(-0.1)) < 1e-6);
}

TEST_CASE("zero and constant fields") {
  const State3 u0{1.5, -2.0, 3.25};
  const auto z = rk4_step([](double, const State3&) { return State3{0, 0, 0}; }, u0, 0.0, 0.1);
  CHECK(z == u0);
  const auto c = rk4_step([](double, const State3&) { return State3{1, -2, 0.5}; },
                          {0, 0, 0}, 0.0, 0.25);
  CHECK(c[0] == 0.25);
  CHECK(c[1] == -0.5);
  CHECK(c[2] == 0.125);
}

TEST_CASE("blowup raises with the failing time") {
  auto bad = [](double t, const State3& u) {
    return t > 0.25 ? State3{std::numeric_limits<double>::infinity(), 0, 0} : u;
  };
  try {
    integrate(bad, {1, 0, 0}, 0.0, 1.0, {0.01, 0.1});
    FAIL("expected blowup");
  } catch (const BlowupError& e) {
    CHECK(e.time() > 0.2);
    CHECK(e.time() < 0.35);
    CHECK(e.partial().size() == 3);
    CHECK(e.partial().states.front() == State3{1, 0, 0});
  }
}

TEST_CASE("empty interval returns the initial state") {
  const auto tr = integrate(decay, {4, 5, 6}, 2.0, 2.0, {});
  REQUIRE(tr.size() == 1);
  CHECK(tr.times[0] == 2.0);
  CHECK(tr.states[0] == State3{4, 5, 6});
}

TEST_CASE("closed form e^-1") {
  const auto tr = integrate(decay, {1, 1, 1}, 0.0, 1.0, {0.001, 0.1});
  REQUIRE(tr.size() == 11);
  for (double v : tr.states.back()) CHECK(std::abs(v - 0.367879) < 1e-6);
}

TEST_CASE("fourth order convergence ratio") {
  auto err = [](double h) {
    const auto tr = integrate(decay, {1, 1, 1}, 0.0, 1.0, {h, 0.5});
    return std::abs(tr.states.back()[0] - std::exp(-1.0));
  };
  const double ratio = err(0.1) / err(0.05);
  CHECK(ratio >= 8.0);
  CHECK(ratio <= 32.0);
  CHECK(err(0.1) == doctest::Approx(std::abs(oracle::rk4_decay(0.1, 10) - std::exp(-1.0))).epsilon(1e-6));
}

TEST_CASE("composition is bit identical") {
  const VectorField f = [](double, const State3& u) { return lorenz_rhs(u, {}); };
  const IntegratorConfig cfg{0.01, 0.1};
  const auto whole = integrate(f, {1, 0, 0}, 0.0, 2.0, cfg);
  const auto first = integrate(f, {1, 0, 0}, 0.0, 1.0, cfg);
  const auto second = integrate(f, first.states.back(), 1.0, 2.0, cfg);
  CHECK(whole.states.back() == second.states.back());
  CHECK(whole.states[10] == first.states.back());
}

TEST_CASE("integrate agrees with simulate_truth") {
  const VectorField f = [](double, const State3& u) { return lorenz_rhs(u, {}); };
  const auto a = integrate(f, kDefaultU0, 0.0, 10.0, {0.01, 0.1});
  const auto b = simulate_truth(kDefaultU0, {}, 0.0, 10.0, 0.1);
  CHECK(a.times == b.times);
  CHECK(a.states == b.states);
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(IntegratorConfig{0.01, 0.1}.validate());
  CHECK(IntegratorConfig{0.01, 0.1}.substeps() == 10);
  CHECK_THROWS_AS((IntegratorConfig{0.03, 0.1}.validate()), ContractError);
  CHECK_THROWS_AS((IntegratorConfig{0.0, 0.1}.validate()), ContractError);
  CHECK_THROWS_AS((IntegratorConfig{0.01, -0.1}.validate()), ContractError);
  CHECK_THROWS_AS(integrate(decay, {1, 1, 1}, 1.0, 0.0, {}), ContractError);
}

TEST_CASE("save grid") {
  CHECK(grid_size(0.0, 10.0, 0.1) == 101);
  CHECK(grid_size(0.0, 0.0, 0.1) == 1);
  CHECK(grid_size(0.0, 8.0, 0.1) == 81);
  const auto tr = integrate(decay, {1, 1, 1}, 0.0, 10.0, {});
  for (std::size_t k = 0; k < tr.size(); ++k) CHECK(tr.times[k] == grid_time(0.0, 0.1, k));
}
