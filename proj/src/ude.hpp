#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "autodiff.hpp"
#include "dynamics.hpp"
#include "net.hpp"
#include "train.hpp"

namespace lsciml {

/// Whether the networks see (t, x, y, z) or only (x, y, z).
enum class InputMode { time_and_state, state_only };

/// z-equation of the augmented system.
///   verbatim:  dz/dt = -beta + z + 10 n3
///   corrected: dz/dt = -beta z + 10 n3
enum class Eq7Form { verbatim, corrected };

/// One network with three outputs, or three single-output networks.
enum class NetLayout { shared, independent };

std::string_view to_string(InputMode m);
std::string_view to_string(Eq7Form f);
std::string_view to_string(NetLayout l);
InputMode parse_input_mode(std::string_view s);
Eq7Form parse_eq7_form(std::string_view s);
NetLayout parse_net_layout(std::string_view s);

/// Known-structure Lorenz system with learned terms n = (n1, n2, n3):
///   dx/dt = sigma (y - n1)
///   dy/dt = -y + 0.1 n2
///   dz/dt = per Eq7Form
struct UdeProblem {
  /// Hidden layers and activation; input_dim is forced by input_mode and
  /// output_dim must be 3.
  MlpSpec spec{4, {25, 25}, 3, Activation::sigmoid};
  InputMode input_mode = InputMode::time_and_state;
  Eq7Form eq7_form = Eq7Form::verbatim;
  NetLayout layout = NetLayout::shared;
  LorenzParams params{};
  State3 u0{1.0, 0.0, 0.0};
  double t0 = 0.0;
  double t1 = 8.0;
  double save_dt = 0.1;
  double step = 0.01;
  Trajectory truth;

  void validate() const;
  RolloutProblem rollout_problem() const { return {u0, t0, t1, {step, save_dt}}; }
  /// Total trainable parameters for the chosen layout.
  std::size_t param_count() const;
};

inline constexpr double kNn2Scale = 0.1;
inline constexpr double kNn3Scale = 10.0;

class UdeField final : public DifferentiableField {
 public:
  explicit UdeField(const UdeProblem& problem);

  std::size_t param_count() const override { return param_count_; }
  std::size_t tape_width() const override { return tape_width_; }
  State3 eval(double t, const State3& u, std::span<const double> theta,
              std::span<double> tape) override;
  State3 vjp(double t, const State3& u, std::span<const double> theta,
             std::span<const double> tape, const State3& cot,
             std::span<double> grad_theta) override;

  /// Raw network outputs (n1, n2, n3) at (t, u).
  State3 network_terms(double t, const State3& u, std::span<const double> theta);

 private:
  std::size_t fill_input(double t, const State3& u, double* in) const;

  InputMode input_mode_;
  Eq7Form eq7_form_;
  NetLayout layout_;
  LorenzParams params_;
  std::vector<MlpEvaluator> nets_;  // one (shared) or three (independent)
  std::size_t net_params_ = 0;
  std::size_t net_tape_ = 0;
  std::size_t param_count_ = 0;
  std::size_t tape_width_ = 0;
};

/// Augmented right-hand side for given network outputs n.
State3 augmented_rhs(const State3& u, const State3& n, const LorenzParams& p, Eq7Form form);

/// Augmented right-hand side (allocating convenience wrapper).
State3 ude_rhs(const State3& u, double t, std::span<const double> theta,
               const UdeProblem& problem);

/// Network outputs that make the augmented system equal the Lorenz system:
///   g1 = x, g2 = 10 x (rho - z),
///   g3 = (x y - beta z + beta - z) / 10   (verbatim)
///   g3 = x y / 10                           (corrected)
State3 analytic_targets(const State3& u, const LorenzParams& p, Eq7Form form);

/// Learned terms next to their analytic targets along the truth samples.
struct ResidualSamples {
  std::vector<double> times;
  std::vector<State3> learned;
  std::vector<State3> target;

  std::size_t size() const { return times.size(); }
  /// RMSE(learned_i - target_i) / stddev(target_i) for each term.
  State3 normalized_rmse() const;
};

Trajectory ude_rollout(const UdeProblem& problem, std::span<const double> theta);
Trajectory ude_forecast(const UdeProblem& problem, std::span<const double> theta,
                        double horizon_t1);
TrainResult train_ude(const UdeProblem& problem, const TrainConfig& config,
                      const ProgressFn& progress = {});
/// Initial parameters used by train_ude for this problem and seed.
FlatParams init_ude_params(const UdeProblem& problem, std::uint64_t seed);
ResidualSamples recover_terms(const UdeProblem& problem, std::span<const double> theta);

}  // namespace lsciml
