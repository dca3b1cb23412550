#include "train.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <optional>

#include "errors.hpp"
#include "optim.hpp"

namespace lsciml {

std::string_view to_string(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::adam: return "adam";
    case OptimizerKind::radam: return "radam";
    case OptimizerKind::adam_bfgs: return "adam+bfgs";
    case OptimizerKind::radam_bfgs: return "radam+bfgs";
    case OptimizerKind::bfgs: return "bfgs";
  }
  return "?";
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "adam") return OptimizerKind::adam;
  if (name == "radam") return OptimizerKind::radam;
  if (name == "adam+bfgs") return OptimizerKind::adam_bfgs;
  if (name == "radam+bfgs") return OptimizerKind::radam_bfgs;
  if (name == "bfgs") return OptimizerKind::bfgs;
  throw ContractError("unknown optimizer '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (iterations < 1) throw ContractError("iteration budget must be at least 1");
  if (!(learning_rate > 0.0)) throw ContractError("learning rate must be > 0");
  if (!(adam_fraction >= 0.0 && adam_fraction <= 1.0))
    throw ContractError("adam_fraction must lie in [0, 1]");
  if (max_blowup_streak < 1) throw ContractError("max_blowup_streak must be >= 1");
  if (horizon_stages < 1) throw ContractError("horizon_stages must be >= 1");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool uses_bfgs(OptimizerKind k) {
  return k == OptimizerKind::adam_bfgs || k == OptimizerKind::radam_bfgs ||
         k == OptimizerKind::bfgs;
}

Trajectory head(const Trajectory& t, std::size_t n) {
  Trajectory out;
  out.times.assign(t.times.begin(), t.times.begin() + static_cast<std::ptrdiff_t>(n));
  out.states.assign(t.states.begin(), t.states.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

}  // namespace

TrainResult train_field(DifferentiableField& field, FlatParams theta0,
                        const RolloutProblem& problem, const Trajectory& truth,
                        const TrainConfig& config, const ProgressFn& progress) {
  config.validate();
  if (theta0.size() != field.param_count())
    throw ContractError("initial parameters do not match the vector field");

  int first_order = config.iterations;
  if (config.optimizer == OptimizerKind::bfgs)
    first_order = 0;
  else if (uses_bfgs(config.optimizer))
    first_order = static_cast<int>(std::lround(config.adam_fraction * config.iterations));
  const int second_order = config.iterations - first_order;
  const bool rectified = config.optimizer == OptimizerKind::radam ||
                         config.optimizer == OptimizerKind::radam_bfgs;

  TrainResult res;
  res.loss_history.reserve(static_cast<std::size_t>(config.iterations));
  FlatParams theta = std::move(theta0);
  FlatParams best = theta;
  double best_loss = kInf;
  RolloutGradient full(field, problem);

  auto record = [&](double loss) {
    res.loss_history.push_back(loss);
    if (progress) progress(static_cast<int>(res.loss_history.size()), loss);
  };

  if (first_order > 0) {
    AdamState state(theta.size(), config.learning_rate);
    AdamState saved = state;  // state before the last accepted step
    std::vector<double> last_grad;
    auto apply = [&](std::span<const double> grad) {
      if (rectified)
        radam_step(state, theta, grad);
      else
        adam_step(state, theta, grad);
    };
    const std::size_t samples = truth.size();
    const int stages = std::min<int>(config.horizon_stages, static_cast<int>(samples));
    int done = 0;
    FlatParams last_finite = theta;
    int streak = 0;
    for (int stage = 1; stage <= stages; ++stage) {
      const int stage_end = static_cast<int>(
          std::lround(static_cast<double>(first_order) * stage / stages));
      const bool final_stage = stage == stages;
      std::optional<RolloutGradient> partial;
      Trajectory partial_truth;
      if (!final_stage) {
        const std::size_t n = std::max<std::size_t>(2, samples * stage / stages);
        RolloutProblem p = problem;
        p.t1 = truth.times[n - 1];
        partial.emplace(field, p);
        partial_truth = head(truth, n);
      }
      for (; done < stage_end; ++done) {
        LossReport lr;
        try {
          lr = final_stage ? full.loss_and_grad(theta, truth)
                           : partial->loss_and_grad(theta, partial_truth);
        } catch (const BlowupError&) {
          record(kInf);
          if (++streak > config.max_blowup_streak)
            throw DivergenceError("rollout blew up for " + std::to_string(streak) +
                                  " consecutive iterations",
                                  res.loss_history);
          // Retry the last step from the last finite point at half the rate.
          theta = last_finite;
          saved.lr *= 0.5;
          state = saved;
          if (!last_grad.empty()) apply(last_grad);
          continue;
        }
        streak = 0;
        record(lr.value);
        if (final_stage && lr.value < best_loss) {
          best_loss = lr.value;
          best = theta;
        }
        last_finite = theta;
        saved = state;
        last_grad = std::move(lr.gradient);
        apply(last_grad);
      }
    }
    res.first_order_iterations = done;
  }

  if (!std::isfinite(best_loss)) {
    // No full-horizon evaluation yet (BFGS only, or every Adam step blew up).
    try {
      best_loss = full.loss_and_grad(theta, truth).value;
      best = theta;
    } catch (const BlowupError&) {
      throw DivergenceError("rollout blows up at every evaluated parameter vector",
                            res.loss_history);
    }
  }
  res.first_order_loss = best_loss;

  if (second_order > 0 && std::isfinite(best_loss)) {
    Objective objective = [&](std::span<const double> th, std::span<double> grad) {
      try {
        auto lr = full.loss_and_grad(th, truth);
        std::copy(lr.gradient.begin(), lr.gradient.end(), grad.begin());
        return lr.value;
      } catch (const BlowupError&) {
        return kInf;
      }
    };
    BfgsOptions opt;
    opt.max_iters = second_order;
    opt.grad_tol = config.bfgs_grad_tol;
    auto bres = bfgs_minimize(objective, best, opt,
                              [&](int, double value, std::span<const double>) { record(value); });
    res.bfgs_iterations = bres.iterations;
    res.bfgs_line_search_failed = bres.line_search_failed;
    if (bres.value <= best_loss) {
      best_loss = bres.value;
      best = std::move(bres.theta);
    }
  }

  if (res.loss_history.empty()) record(best_loss);
  res.theta = std::move(best);
  res.final_loss = best_loss;
  return res;
}

}  // namespace lsciml
