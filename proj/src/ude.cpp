#include "ude.hpp"

#include <cmath>

#include "errors.hpp"

namespace lsciml {

std::string_view to_string(InputMode m) {
  return m == InputMode::time_and_state ? "time_and_state" : "state_only";
}
std::string_view to_string(Eq7Form f) { return f == Eq7Form::verbatim ? "verbatim" : "corrected"; }
std::string_view to_string(NetLayout l) { return l == NetLayout::shared ? "shared" : "independent"; }

InputMode parse_input_mode(std::string_view s) {
  if (s == "time_and_state") return InputMode::time_and_state;
  if (s == "state_only") return InputMode::state_only;
  throw ContractError("unknown input mode '" + std::string(s) + "'");
}
Eq7Form parse_eq7_form(std::string_view s) {
  if (s == "verbatim") return Eq7Form::verbatim;
  if (s == "corrected") return Eq7Form::corrected;
  throw ContractError("unknown eq7 form '" + std::string(s) + "'");
}
NetLayout parse_net_layout(std::string_view s) {
  if (s == "shared") return NetLayout::shared;
  if (s == "independent") return NetLayout::independent;
  throw ContractError("unknown network layout '" + std::string(s) + "'");
}

namespace {

std::size_t input_dim_for(InputMode m) { return m == InputMode::time_and_state ? 4 : 3; }

MlpSpec subnet_spec(const UdeProblem& p) {
  MlpSpec s = p.spec;
  s.input_dim = input_dim_for(p.input_mode);
  s.output_dim = p.layout == NetLayout::shared ? 3 : 1;
  return s;
}

}  // namespace

void UdeProblem::validate() const {
  spec.validate();
  params.validate();
  if (spec.output_dim != 3) throw ContractError("UDE network must have 3 outputs");
  if (spec.input_dim != input_dim_for(input_mode))
    throw ContractError("UDE network input_dim " + std::to_string(spec.input_dim) +
                        " does not match input mode " + std::string(to_string(input_mode)));
  IntegratorConfig{step, save_dt}.validate();
  const std::size_t n = grid_size(t0, t1, save_dt);
  if (truth.size() != n) throw ContractError("truth trajectory does not match the training grid");
  for (std::size_t k = 0; k < n; ++k)
    if (truth.times[k] != grid_time(t0, save_dt, k))
      throw ContractError("truth trajectory does not match the training grid");
}

std::size_t UdeProblem::param_count() const {
  const std::size_t one = subnet_spec(*this).param_count();
  return layout == NetLayout::shared ? one : 3 * one;
}

UdeField::UdeField(const UdeProblem& problem)
    : input_mode_(problem.input_mode),
      eq7_form_(problem.eq7_form),
      layout_(problem.layout),
      params_(problem.params) {
  if (problem.spec.output_dim != 3) throw ContractError("UDE network must have 3 outputs");
  const MlpSpec sub = subnet_spec(problem);
  const std::size_t count = layout_ == NetLayout::shared ? 1 : 3;
  for (std::size_t i = 0; i < count; ++i) nets_.emplace_back(sub);
  net_params_ = nets_.front().param_count();
  net_tape_ = nets_.front().tape_width();
  param_count_ = count * net_params_;
  tape_width_ = count * net_tape_;
}

std::size_t UdeField::fill_input(double t, const State3& u, double* in) const {
  if (input_mode_ == InputMode::time_and_state) {
    in[0] = t;
    in[1] = u[0];
    in[2] = u[1];
    in[3] = u[2];
    return 4;
  }
  in[0] = u[0];
  in[1] = u[1];
  in[2] = u[2];
  return 3;
}

State3 UdeField::network_terms(double t, const State3& u, std::span<const double> theta) {
  if (theta.size() != param_count_)
    throw ContractError("parameter vector does not match the UDE networks");
  double in[4];
  const std::size_t nin = fill_input(t, u, in);
  State3 n{};
  if (layout_ == NetLayout::shared) {
    nets_[0].forward(theta, {in, nin}, n);
  } else {
    for (std::size_t i = 0; i < 3; ++i)
      nets_[i].forward(theta.subspan(i * net_params_, net_params_), {in, nin}, {&n[i], 1});
  }
  return n;
}

State3 UdeField::eval(double t, const State3& u, std::span<const double> theta,
                      std::span<double> tape) {
  if (theta.size() != param_count_)
    throw ContractError("parameter vector does not match the UDE networks");
  double in[4];
  const std::size_t nin = fill_input(t, u, in);
  State3 n{};
  if (layout_ == NetLayout::shared) {
    nets_[0].forward(theta, {in, nin}, n, tape);
  } else {
    for (std::size_t i = 0; i < 3; ++i)
      nets_[i].forward(theta.subspan(i * net_params_, net_params_), {in, nin}, {&n[i], 1},
                       tape.empty() ? std::span<double>{} : tape.subspan(i * net_tape_, net_tape_));
  }
  return augmented_rhs(u, n, params_, eq7_form_);
}

State3 UdeField::vjp(double, const State3&, std::span<const double> theta,
                     std::span<const double> tape, const State3& cot,
                     std::span<double> grad_theta) {
  const State3 cot_n{-params_.sigma * cot[0], kNn2Scale * cot[1], kNn3Scale * cot[2]};
  State3 cot_u{0.0, params_.sigma * cot[0] - cot[1],
               eq7_form_ == Eq7Form::verbatim ? cot[2] : -params_.beta * cot[2]};

  const std::size_t nin = input_mode_ == InputMode::time_and_state ? 4 : 3;
  const std::size_t skip = nin - 3;
  double gin[4];
  if (layout_ == NetLayout::shared) {
    nets_[0].backward(theta, tape, cot_n, {gin, nin}, grad_theta);
    for (std::size_t c = 0; c < 3; ++c) cot_u[c] += gin[skip + c];
  } else {
    for (std::size_t i = 0; i < 3; ++i) {
      nets_[i].backward(theta.subspan(i * net_params_, net_params_),
                        tape.subspan(i * net_tape_, net_tape_), {&cot_n[i], 1}, {gin, nin},
                        grad_theta.subspan(i * net_params_, net_params_));
      for (std::size_t c = 0; c < 3; ++c) cot_u[c] += gin[skip + c];
    }
  }
  return cot_u;
}

State3 augmented_rhs(const State3& u, const State3& n, const LorenzParams& p, Eq7Form form) {
  const auto [x, y, z] = u;
  const double dz = form == Eq7Form::verbatim ? -p.beta + z + kNn3Scale * n[2]
                                              : -p.beta * z + kNn3Scale * n[2];
  return {p.sigma * (y - n[0]), -y + kNn2Scale * n[1], dz};
}

State3 ude_rhs(const State3& u, double t, std::span<const double> theta,
               const UdeProblem& problem) {
  UdeField field(problem);
  return field.eval(t, u, theta, {});
}

State3 analytic_targets(const State3& u, const LorenzParams& p, Eq7Form form) {
  const auto [x, y, z] = u;
  const double g1 = x;
  const double g2 = x * (p.rho - z) / kNn2Scale;
  const double g3 = form == Eq7Form::verbatim ? (x * y - p.beta * z + p.beta - z) / kNn3Scale
                                              : x * y / kNn3Scale;
  return {g1, g2, g3};
}

State3 ResidualSamples::normalized_rmse() const {
  State3 out{};
  const double n = static_cast<double>(size());
  if (size() == 0) return out;
  for (std::size_t c = 0; c < 3; ++c) {
    double mean = 0.0;
    for (const auto& g : target) mean += g[c];
    mean /= n;
    double var = 0.0, sse = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
      var += (target[i][c] - mean) * (target[i][c] - mean);
      const double r = learned[i][c] - target[i][c];
      sse += r * r;
    }
    const double sd = std::sqrt(var / n);
    const double rmse = std::sqrt(sse / n);
    out[c] = sd > 0.0 ? rmse / sd : (rmse == 0.0 ? 0.0 : INFINITY);
  }
  return out;
}

Trajectory ude_rollout(const UdeProblem& problem, std::span<const double> theta) {
  UdeField field(problem);
  return rollout(field, theta, problem.rollout_problem());
}

Trajectory ude_forecast(const UdeProblem& problem, std::span<const double> theta,
                        double horizon_t1) {
  if (horizon_t1 < problem.t1) throw ContractError("forecast horizon precedes the training end");
  UdeField field(problem);
  RolloutProblem p = problem.rollout_problem();
  p.t1 = horizon_t1;
  return rollout(field, theta, p);
}

FlatParams init_ude_params(const UdeProblem& problem, std::uint64_t seed) {
  const MlpSpec sub = subnet_spec(problem);
  if (problem.layout == NetLayout::shared) return init_params(sub, seed);
  FlatParams theta;
  for (std::uint64_t i = 0; i < 3; ++i) {
    const auto part = init_params(sub, seed + i);
    theta.insert(theta.end(), part.begin(), part.end());
  }
  return theta;
}

TrainResult train_ude(const UdeProblem& problem, const TrainConfig& config,
                      const ProgressFn& progress) {
  problem.validate();
  config.validate();
  UdeField field(problem);
  return train_field(field, init_ude_params(problem, config.seed), problem.rollout_problem(),
                     problem.truth, config, progress);
}

ResidualSamples recover_terms(const UdeProblem& problem, std::span<const double> theta) {
  UdeField field(problem);
  ResidualSamples out;
  out.times = problem.truth.times;
  out.learned.reserve(problem.truth.size());
  out.target.reserve(problem.truth.size());
  for (std::size_t i = 0; i < problem.truth.size(); ++i) {
    const State3& u = problem.truth.states[i];
    out.learned.push_back(field.network_terms(problem.truth.times[i], u, theta));
    out.target.push_back(analytic_targets(u, problem.params, problem.eq7_form));
  }
  return out;
}

}  // namespace lsciml
