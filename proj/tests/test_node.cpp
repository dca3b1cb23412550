#include <doctest.h>

#include <cmath>

#include "dynamics.hpp"
#include "errors.hpp"
#include "harness.hpp"
#include "node.hpp"

using namespace lsciml;

namespace {

NodeProblem small_problem(double t1 = 1.0) {
  NodeProblem p;
  p.spec.hidden_layers = {8};
  p.t1 = t1;
  p.truth = simulate_truth(p.u0, {}, 0.0, t1, p.save_dt);
  return p;
}

}  // namespace

TEST_CASE("zero parameters give a constant rollout") {
  NodeProblem p;
  p.truth = simulate_truth(p.u0, {}, 0, 10, 0.1);
  const std::vector<double> zero(p.spec.param_count(), 0.0);
  const auto tr = node_rollout(p, zero);
  REQUIRE(tr.size() == 101);
  for (const auto& s : tr.states) CHECK(s == p.u0);
  CHECK(same_grid(tr, p.truth));
}

TEST_CASE("rollout over an empty span") {
  NodeProblem p;
  p.t1 = 0.0;
  p.truth = simulate_truth(p.u0, {}, 0, 0, 0.1);
  const auto tr = node_rollout(p, init_params(p.spec, 1));
  REQUIRE(tr.size() == 1);
  CHECK(tr.states[0] == p.u0);
}

TEST_CASE("problem validation") {
  NodeProblem p = small_problem();
  CHECK_NOTHROW(p.validate());
  NodeProblem q = p;
  q.spec.input_dim = 4;
  CHECK_THROWS_AS(q.validate(), ContractError);
  NodeProblem r = p;
  r.truth = simulate_truth(p.u0, {}, 0, 2, 0.1);
  CHECK_THROWS_AS(r.validate(), ContractError);
}

TEST_CASE("iteration budget contract") {
  const auto p = small_problem();
  TrainConfig c;
  c.iterations = 0;
  CHECK_THROWS_AS(train_node(p, c), ContractError);
  c.iterations = 1;
  const auto r = train_node(p, c);
  CHECK(r.loss_history.size() == 1);
}

TEST_CASE("short training reduces the loss and keeps the best parameters") {
  const auto p = small_problem(2.0);
  TrainConfig c;
  c.iterations = 200;
  std::vector<double> seen;
  const auto r = train_node(p, c, [&](int it, double l) {
    CHECK(it == static_cast<int>(seen.size()) + 1);
    seen.push_back(l);
  });
  CHECK(seen == r.loss_history);
  CHECK(r.loss_history.size() == 200);
  CHECK(r.final_loss <= r.loss_history.front());
  double best = INFINITY;
  for (double l : r.loss_history) best = std::min(best, l);
  CHECK(r.final_loss == best);
  const auto pred = node_rollout(p, r.theta);
  CHECK(trajectory_loss(pred, p.truth) == r.final_loss);
}

TEST_CASE("training is bit reproducible") {
  const auto p = small_problem(2.0);
  TrainConfig c;
  c.iterations = 60;
  c.optimizer = OptimizerKind::radam;
  const auto a = train_node(p, c);
  const auto b = train_node(p, c);
  CHECK(a.loss_history == b.loss_history);
  CHECK(a.theta == b.theta);
  c.seed = 43;
  CHECK(train_node(p, c).loss_history != a.loss_history);
}

TEST_CASE("adam then bfgs never loses ground") {
  const auto p = small_problem(1.0);
  TrainConfig c;
  c.iterations = 100;
  c.optimizer = OptimizerKind::adam_bfgs;
  const auto r = train_node(p, c);
  CHECK(r.first_order_iterations == 90);
  CHECK(r.bfgs_iterations <= 10);
  CHECK(r.final_loss <= r.first_order_loss);
  CHECK(r.loss_history.size() == static_cast<std::size_t>(90 + r.bfgs_iterations));
}

TEST_CASE("forecast") {
  const auto p = small_problem(1.0);
  const auto th = init_params(p.spec, 5);
  const auto same = forecast(p, th, 1.0);
  const auto train = node_rollout(p, th);
  CHECK(same.states == train.states);
  const auto longer = forecast(p, th, 3.0);
  CHECK(longer.size() == 31);
  for (std::size_t k = 0; k < train.size(); ++k) CHECK(longer.states[k] == train.states[k]);
  CHECK_THROWS_AS(forecast(p, th, 0.5), ContractError);
}

TEST_CASE("untrained forecast breaks down early") {
  NodeProblem p;
  p.truth = simulate_truth(p.u0, {}, 0, 10, 0.1);
  const std::vector<double> zero(p.spec.param_count(), 0.0);
  const auto pred = forecast(p, zero, 15.0);
  const auto truth = simulate_truth(p.u0, {}, 0, 15, 0.1);
  const auto rep = detect_breakdown(pred, truth, 0.2, 10.0);
  REQUIRE(rep.breakdown_time.has_value());
  // First sample where the truth has left u0 by more than 0.2 D.
  std::optional<double> expected;
  for (std::size_t k = 0; k < truth.size() && !expected; ++k) {
    const auto& s = truth.states[k];
    if (std::hypot(s[0] - 1.0, s[1], s[2]) / rep.scale > 0.2) expected = truth.times[k];
  }
  CHECK(*rep.breakdown_time == *expected);
}

TEST_CASE("divergence after persistent blowups") {
  auto p = small_problem(10.0);
  p.spec.hidden_layers = {};
  p.truth = simulate_truth(p.u0, {}, 0, 10, 0.1);
  NodeField f(p.spec);
  std::vector<double> th(12, 0.0);
  th[0] = th[4] = th[8] = 500.0;
  TrainConfig c;
  c.iterations = 50;
  c.max_blowup_streak = 5;
  try {
    train_field(f, th, p.rollout_problem(), p.truth, c);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.history().size() == 6);
    for (double l : e.history()) CHECK(std::isinf(l));
  }
}
