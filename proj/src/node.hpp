#pragma once

#include <span>

#include "autodiff.hpp"
#include "net.hpp"
#include "train.hpp"

namespace lsciml {

/// du/dt = MLP(u): the network replaces the whole right-hand side.
class NodeField final : public DifferentiableField {
 public:
  explicit NodeField(const MlpSpec& spec);

  std::size_t param_count() const override { return net_.param_count(); }
  std::size_t tape_width() const override { return net_.tape_width(); }
  State3 eval(double t, const State3& u, std::span<const double> theta,
              std::span<double> tape) override;
  State3 vjp(double t, const State3& u, std::span<const double> theta,
             std::span<const double> tape, const State3& cot,
             std::span<double> grad_theta) override;

 private:
  MlpEvaluator net_;
};

struct NodeProblem {
  MlpSpec spec{};
  State3 u0{1.0, 0.0, 0.0};
  double t0 = 0.0;
  double t1 = 10.0;
  double save_dt = 0.1;
  double step = 0.01;
  Trajectory truth;

  /// Throws ContractError unless the network is 3 -> 3 and the truth grid
  /// matches (t0, t1, save_dt).
  void validate() const;
  RolloutProblem rollout_problem() const { return {u0, t0, t1, {step, save_dt}}; }
};

/// Integrates the learned field over the training span.
Trajectory node_rollout(const NodeProblem& problem, std::span<const double> theta);

/// Rollout from u0 over (t0, horizon_t1) without retraining. Blowups throw
/// BlowupError carrying the partial trajectory.
Trajectory forecast(const NodeProblem& problem, std::span<const double> theta,
                    double horizon_t1);

/// Trains from init_params(spec, config.seed).
TrainResult train_node(const NodeProblem& problem, const TrainConfig& config,
                       const ProgressFn& progress = {});

}  // namespace lsciml
