#include "node.hpp"

#include <cmath>

#include "errors.hpp"

namespace lsciml {

NodeField::NodeField(const MlpSpec& spec) : net_(spec) {
  if (spec.input_dim != 3 || spec.output_dim != 3)
    throw ContractError("Neural ODE network must map 3 inputs to 3 outputs");
}

State3 NodeField::eval(double, const State3& u, std::span<const double> theta,
                       std::span<double> tape) {
  State3 out;
  net_.forward(theta, u, out, tape);
  return out;
}

State3 NodeField::vjp(double, const State3&, std::span<const double> theta,
                      std::span<const double> tape, const State3& cot,
                      std::span<double> grad_theta) {
  State3 cot_u;
  net_.backward(theta, tape, cot, cot_u, grad_theta);
  return cot_u;
}

void NodeProblem::validate() const {
  spec.validate();
  if (spec.input_dim != 3 || spec.output_dim != 3)
    throw ContractError("Neural ODE network must map 3 inputs to 3 outputs");
  IntegratorConfig{step, save_dt}.validate();
  const std::size_t n = grid_size(t0, t1, save_dt);
  if (truth.size() != n) throw ContractError("truth trajectory does not match the training grid");
  for (std::size_t k = 0; k < n; ++k)
    if (truth.times[k] != grid_time(t0, save_dt, k))
      throw ContractError("truth trajectory does not match the training grid");
}

Trajectory node_rollout(const NodeProblem& problem, std::span<const double> theta) {
  NodeField field(problem.spec);
  return rollout(field, theta, problem.rollout_problem());
}

Trajectory forecast(const NodeProblem& problem, std::span<const double> theta,
                    double horizon_t1) {
  if (horizon_t1 < problem.t1) throw ContractError("forecast horizon precedes the training end");
  NodeField field(problem.spec);
  RolloutProblem p = problem.rollout_problem();
  p.t1 = horizon_t1;
  return rollout(field, theta, p);
}

TrainResult train_node(const NodeProblem& problem, const TrainConfig& config,
                       const ProgressFn& progress) {
  problem.validate();
  config.validate();
  NodeField field(problem.spec);
  return train_field(field, init_params(problem.spec, config.seed), problem.rollout_problem(),
                     problem.truth, config, progress);
}

}  // namespace lsciml
