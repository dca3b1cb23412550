#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dynamics.hpp"
#include "errors.hpp"
#include "oracles.hpp"

using namespace lsciml;

TEST_CASE("lorenz rhs at (1,1,1)") {
  const auto d = lorenz_rhs({1, 1, 1}, LorenzParams::canonical());
  CHECK(d[0] == 0.0);
  CHECK(d[1] == 26.0);
  CHECK(d[2] == doctest::Approx(-5.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("canonical parameters") {
  const auto p = LorenzParams::canonical();
  CHECK(p.sigma == 10.0);
  CHECK(p.rho == 28.0);
  CHECK(p.beta == 8.0 / 3.0);
}

TEST_CASE("rhs vanishes at the fixed points") {
  const auto p = LorenzParams::canonical();
  const double c = std::sqrt(p.beta * (p.rho - 1.0));
  const oracle::Vec3 pts[] = {{0, 0, 0}, {c, c, p.rho - 1}, {-c, -c, p.rho - 1}};
  const auto fps = fixed_points(p);
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 3; ++i) CHECK(fps[k][i] == doctest::Approx(pts[k][i]).epsilon(1e-15));
    const auto d = lorenz_rhs(fps[k], p);
    for (double v : d) CHECK(std::abs(v) < 1e-12);
  }
  const auto d = lorenz_rhs({std::sqrt(72.0), std::sqrt(72.0), 27.0}, p);
  for (double v : d) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("rhs matches the oracle on scattered states") {
  for (double x = -15; x <= 15; x += 7.5)
    for (double y = -20; y <= 20; y += 10)
      for (double z = 0; z <= 45; z += 15) {
        const auto a = lorenz_rhs({x, y, z}, {});
        const auto b = oracle::lorenz({x, y, z});
        for (int i = 0; i < 3; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
      }
}

TEST_CASE("non-finite parameters are rejected") {
  LorenzParams p;
  p.rho = std::nan("");
  CHECK_THROWS_AS(p.validate(), ContractError);
  CHECK_THROWS_AS(simulate_truth(kDefaultU0, p, 0, 1, 0.1), ContractError);
}

TEST_CASE("default truth trajectory is bounded") {
  const auto tr = simulate_truth(kDefaultU0, {}, 0.0, 10.0, 0.1);
  REQUIRE(tr.size() == 101);
  CHECK(tr.times.front() == 0.0);
  CHECK(tr.times.back() == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(tr.states.front() == kDefaultU0);
  for (const auto& s : tr.states) {
    CHECK(std::abs(s[0]) <= 30.0);
    CHECK(std::abs(s[1]) <= 30.0);
    CHECK(s[2] >= 0.0);
    CHECK(s[2] <= 60.0);
  }
}

TEST_CASE("empty span gives the initial state") {
  const auto tr = simulate_truth({2, 3, 4}, {}, 0.0, 0.0, 0.1);
  REQUIRE(tr.size() == 1);
  CHECK(tr.states[0] == State3{2, 3, 4});
}

TEST_CASE("nearby initial states separate") {
  const auto a = simulate_truth({1.0, 0, 0}, {}, 0, 10, 0.1);
  const auto b = simulate_truth({1.0 + 1e-8, 0, 0}, {}, 0, 10, 0.1);
  const auto& sa = a.states.back();
  const auto& sb = b.states.back();
  const double d = std::hypot(sa[0] - sb[0], sa[1] - sb[1], sa[2] - sb[2]);
  CHECK(d > 1e-4);
}

TEST_CASE("nearby initial states: separation against a DOP853 reference") {
  // scipy DOP853, rtol 1e-13: |d| = 2.9318e-8 at t=10, 1.5322e-4 at t=30.
  auto sep = [](double t1) {
    const auto a = simulate_truth({1.0, 0, 0}, {}, 0, t1, 0.1).states.back();
    const auto b = simulate_truth({1.0 + 1e-8, 0, 0}, {}, 0, t1, 0.1).states.back();
    return std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
  };
  CHECK(sep(10) == doctest::Approx(2.9318e-8).epsilon(0.02));
  CHECK(sep(30) > 1e-4);
  CHECK(sep(40) > 0.1);
}

TEST_CASE("truth generation is deterministic") {
  const auto a = simulate_truth(kDefaultU0, {}, 0, 10, 0.1);
  const auto b = simulate_truth(kDefaultU0, {}, 0, 10, 0.1);
  CHECK(a.times == b.times);
  CHECK(a.states == b.states);
}

TEST_CASE("truth error shrinks at fourth order on [0,5]") {
  // Reference at a much finer step; compare steps 0.01 and 0.005.
  const auto ref = simulate_truth(kDefaultU0, {}, 0, 5, 0.1, 0.000625).states.back();
  auto err = [&](double h) {
    const auto s = simulate_truth(kDefaultU0, {}, 0, 5, 0.1, h).states.back();
    return std::hypot(s[0] - ref[0], s[1] - ref[1], s[2] - ref[2]);
  };
  const double ratio = err(0.01) / err(0.005);
  CHECK(ratio >= 4.0);
  CHECK(ratio <= 64.0);
}

TEST_CASE("trajectory csv round trip") {
  const auto tr = simulate_truth(kDefaultU0, {}, 0, 1, 0.1);
  std::stringstream ss;
  write_csv(ss, tr);
  std::string header;
  std::getline(std::stringstream(ss.str()), header);
  CHECK(header == "t,x,y,z");
  const auto back = read_csv(ss);
  CHECK(back.times == tr.times);
  CHECK(back.states == tr.states);
}

TEST_CASE("trajectory validation") {
  Trajectory t;
  t.push_back(0.0, {0, 0, 0});
  t.push_back(0.0, {0, 0, 0});
  CHECK_THROWS_AS(t.validate(), ContractError);
  Trajectory u;
  u.push_back(0.0, {0, std::nan(""), 0});
  CHECK_THROWS_AS(u.validate(), ContractError);
}
