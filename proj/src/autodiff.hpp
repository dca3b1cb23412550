#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "integrate.hpp"
#include "trajectory.hpp"

namespace lsciml {

/// A vector field f(t, u; theta) that can record a forward evaluation and
/// replay it backwards. Implementations own scratch buffers, so an instance
/// belongs to one thread.
class DifferentiableField {
 public:
  virtual ~DifferentiableField() = default;

  virtual std::size_t param_count() const = 0;
  /// Doubles recorded per evaluation for the reverse pass.
  virtual std::size_t tape_width() const = 0;

  /// Evaluates the field; records into `tape` when it is non-empty.
  virtual State3 eval(double t, const State3& u, std::span<const double> theta,
                      std::span<double> tape) = 0;

  /// Vector-Jacobian product at a recorded point: returns cot^T df/du and
  /// accumulates cot^T df/dtheta into grad_theta.
  virtual State3 vjp(double t, const State3& u, std::span<const double> theta,
                     std::span<const double> tape, const State3& cot,
                     std::span<double> grad_theta) = 0;
};

/// Initial value problem solved by the training rollout.
struct RolloutProblem {
  State3 u0{1.0, 0.0, 0.0};
  double t0 = 0.0;
  double t1 = 10.0;
  IntegratorConfig integrator{};
};

/// Value and gradient of the trajectory loss.
struct LossReport {
  double value = 0.0;
  std::vector<double> gradient;
};

/// Sum over samples and components of squared error. Grids must match.
double trajectory_loss(const Trajectory& pred, const Trajectory& truth);

/// Plain forward rollout (no tape).
Trajectory rollout(DifferentiableField& field, std::span<const double> theta,
                   const RolloutProblem& problem);

/// Reverse-mode derivative of trajectory_loss(rollout(theta), truth) through
/// every RK4 stage. Reuses its tape across calls; one per training run.
class RolloutGradient {
 public:
  RolloutGradient(DifferentiableField& field, RolloutProblem problem);

  /// Throws BlowupError (with the partial rollout) if the rollout diverges.
  LossReport loss_and_grad(std::span<const double> theta, const Trajectory& truth);

  /// Same as loss_and_grad but with per-sample weights on the squared error
  /// (weight 0 drops a sample). `weights` has one entry per save point.
  LossReport weighted_loss_and_grad(std::span<const double> theta, const Trajectory& truth,
                                    std::span<const double> weights);

  const RolloutProblem& problem() const { return problem_; }

 private:
  DifferentiableField& field_;
  RolloutProblem problem_;
  std::size_t substeps_;
  std::size_t samples_;
  double h_;
  // Per step: 4 stage inputs and 4 field tapes.
  std::vector<State3> stage_states_;
  std::vector<double> tapes_;
  std::vector<State3> saved_;
};

/// Convenience one-shot wrapper.
LossReport loss_and_grad(DifferentiableField& field, std::span<const double> theta,
                         const RolloutProblem& problem, const Trajectory& truth);

}  // namespace lsciml
