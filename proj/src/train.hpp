#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "autodiff.hpp"
#include "net.hpp"

namespace lsciml {

enum class OptimizerKind { adam, radam, adam_bfgs, radam_bfgs, bfgs };

std::string_view to_string(OptimizerKind k);
OptimizerKind parse_optimizer(std::string_view name);

/// Optimizer settings for one training run.
struct TrainConfig {
  OptimizerKind optimizer = OptimizerKind::adam;
  double learning_rate = 0.01;
  /// Total iteration budget; for the Adam->BFGS pipelines it is split by
  /// `adam_fraction`.
  int iterations = 50000;
  std::uint64_t seed = 42;
  double adam_fraction = 0.9;
  double bfgs_grad_tol = 1e-8;
  /// Consecutive blowups tolerated before giving up.
  int max_blowup_streak = 100;
  /// Number of horizon stages. With n > 1 the first-order phase fits the
  /// first k/n of the save grid during stage k (single shooting from u0 in
  /// every stage); the last stage and any BFGS refinement use the full grid.
  int horizon_stages = 1;

  void validate() const;
};

struct TrainResult {
  FlatParams theta;                 ///< best parameters seen
  std::vector<double> loss_history; ///< one entry per iteration (inf on blowup)
  double final_loss = 0.0;          ///< full-horizon loss at `theta`
  int first_order_iterations = 0;
  int bfgs_iterations = 0;
  double first_order_loss = 0.0;    ///< incumbent handed to BFGS
  bool bfgs_line_search_failed = false;
};

/// (iteration, loss) progress hook; called every iteration.
using ProgressFn = std::function<void(int, double)>;

/// Minimizes the trajectory SSE of `field` against `truth` from theta0.
/// Throws DivergenceError after too many consecutive blowups.
TrainResult train_field(DifferentiableField& field, FlatParams theta0,
                        const RolloutProblem& problem, const Trajectory& truth,
                        const TrainConfig& config, const ProgressFn& progress = {});

}  // namespace lsciml
