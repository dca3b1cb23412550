#include "autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace lsciml {

double trajectory_loss(const Trajectory& pred, const Trajectory& truth) {
  if (!same_grid(pred, truth))
    throw ContractError("trajectory_loss: prediction and truth grids differ");
  double sse = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i)
    for (std::size_t c = 0; c < 3; ++c) {
      const double r = pred.states[i][c] - truth.states[i][c];
      sse += r * r;
    }
  return sse;
}

Trajectory rollout(DifferentiableField& field, std::span<const double> theta,
                   const RolloutProblem& problem) {
  if (theta.size() != field.param_count())
    throw ContractError("parameter vector does not match the vector field");
  return integrate(
      [&](double t, const State3& u) { return field.eval(t, u, theta, {}); }, problem.u0,
      problem.t0, problem.t1, problem.integrator);
}

RolloutGradient::RolloutGradient(DifferentiableField& field, RolloutProblem problem)
    : field_(field), problem_(problem) {
  substeps_ = problem_.integrator.substeps();
  h_ = problem_.integrator.effective_step();
  samples_ = grid_size(problem_.t0, problem_.t1, problem_.integrator.save_dt);
  const std::size_t steps = (samples_ - 1) * substeps_;
  stage_states_.resize(steps * 4);
  tapes_.resize(steps * 4 * field_.tape_width());
  saved_.resize(samples_);
}

LossReport RolloutGradient::loss_and_grad(std::span<const double> theta,
                                          const Trajectory& truth) {
  return weighted_loss_and_grad(theta, truth, {});
}

namespace {

inline State3 axpy(const State3& u, double a, const State3& k) {
  return {u[0] + a * k[0], u[1] + a * k[1], u[2] + a * k[2]};
}

}  // namespace

LossReport RolloutGradient::weighted_loss_and_grad(std::span<const double> theta,
                                                   const Trajectory& truth,
                                                   std::span<const double> weights) {
  if (theta.size() != field_.param_count())
    throw ContractError("parameter vector does not match the vector field");
  if (truth.size() != samples_)
    throw ContractError("truth has " + std::to_string(truth.size()) +
                        " samples, rollout grid has " + std::to_string(samples_));
  for (std::size_t k = 0; k < samples_; ++k)
    if (truth.times[k] != grid_time(problem_.t0, problem_.integrator.save_dt, k))
      throw ContractError("truth time grid does not match the rollout save grid");
  if (!weights.empty() && weights.size() != samples_)
    throw ContractError("weights must have one entry per save point");

  const std::size_t tw = field_.tape_width();
  const double half = 0.5 * h_;
  const double w6 = h_ / 6.0;
  const double save_dt = problem_.integrator.save_dt;

  // Forward pass, recording stage inputs and field tapes.
  State3 u = problem_.u0;
  saved_[0] = u;
  std::size_t s = 0;
  for (std::size_t k = 1; k < samples_; ++k) {
    const double base = grid_time(problem_.t0, save_dt, k - 1);
    for (std::size_t j = 0; j < substeps_; ++j, ++s) {
      const double t = base + static_cast<double>(j) * h_;
      State3* st = &stage_states_[4 * s];
      double* tp = tapes_.data() + 4 * s * tw;
      st[0] = u;
      const State3 k1 = field_.eval(t, st[0], theta, {tp, tw});
      st[1] = axpy(u, half, k1);
      const State3 k2 = field_.eval(t + half, st[1], theta, {tp + tw, tw});
      st[2] = axpy(u, half, k2);
      const State3 k3 = field_.eval(t + half, st[2], theta, {tp + 2 * tw, tw});
      st[3] = axpy(u, h_, k3);
      const State3 k4 = field_.eval(t + h_, st[3], theta, {tp + 3 * tw, tw});
      for (std::size_t i = 0; i < 3; ++i)
        u[i] = u[i] + w6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!is_finite(k1) || !is_finite(k2) || !is_finite(k3) || !is_finite(k4) || !is_finite(u)) {
        Trajectory partial;
        for (std::size_t i = 0; i < k; ++i) partial.push_back(truth.times[i], saved_[i]);
        throw BlowupError(t, std::move(partial));
      }
    }
    saved_[k] = u;
  }

  LossReport report;
  report.gradient.assign(theta.size(), 0.0);
  for (std::size_t k = 0; k < samples_; ++k) {
    const double w = weights.empty() ? 1.0 : weights[k];
    for (std::size_t c = 0; c < 3; ++c) {
      const double r = saved_[k][c] - truth.states[k][c];
      report.value += w * r * r;
    }
  }
  auto residual_cot = [&](std::size_t k, State3& cot) {
    const double w = weights.empty() ? 1.0 : weights[k];
    for (std::size_t c = 0; c < 3; ++c) cot[c] += 2.0 * w * (saved_[k][c] - truth.states[k][c]);
  };

  // Reverse pass. `cot` is d(loss)/d(state after the current step).
  State3 cot{0.0, 0.0, 0.0};
  s = (samples_ - 1) * substeps_;
  for (std::size_t k = samples_ - 1; k > 0; --k) {
    residual_cot(k, cot);
    const double base = grid_time(problem_.t0, save_dt, k - 1);
    for (std::size_t j = substeps_; j-- > 0;) {
      --s;
      const double t = base + static_cast<double>(j) * h_;
      const State3* st = &stage_states_[4 * s];
      const double* tp = tapes_.data() + 4 * s * tw;
      State3 ck1, ck2, ck3, ck4;
      for (std::size_t i = 0; i < 3; ++i) {
        ck1[i] = w6 * cot[i];
        ck2[i] = 2.0 * w6 * cot[i];
        ck3[i] = 2.0 * w6 * cot[i];
        ck4[i] = w6 * cot[i];
      }
      const State3 c4 = field_.vjp(t + h_, st[3], theta, {tp + 3 * tw, tw}, ck4, report.gradient);
      for (std::size_t i = 0; i < 3; ++i) {
        cot[i] += c4[i];
        ck3[i] += h_ * c4[i];
      }
      const State3 c3 = field_.vjp(t + half, st[2], theta, {tp + 2 * tw, tw}, ck3, report.gradient);
      for (std::size_t i = 0; i < 3; ++i) {
        cot[i] += c3[i];
        ck2[i] += half * c3[i];
      }
      const State3 c2 = field_.vjp(t + half, st[1], theta, {tp + tw, tw}, ck2, report.gradient);
      for (std::size_t i = 0; i < 3; ++i) {
        cot[i] += c2[i];
        ck1[i] += half * c2[i];
      }
      const State3 c1 = field_.vjp(t, st[0], theta, {tp, tw}, ck1, report.gradient);
      for (std::size_t i = 0; i < 3; ++i) cot[i] += c1[i];
    }
  }
  return report;
}

LossReport loss_and_grad(DifferentiableField& field, std::span<const double> theta,
                         const RolloutProblem& problem, const Trajectory& truth) {
  RolloutGradient g(field, problem);
  return g.loss_and_grad(theta, truth);
}

}  // namespace lsciml
