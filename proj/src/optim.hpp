#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace lsciml {

/// Moment estimates shared by Adam and RAdam.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  AdamState(std::size_t n, double learning_rate)
      : m(n, 0.0), v(n, 0.0), lr(learning_rate) {}
};

/// Bias-corrected Adam update of theta in place.
void adam_step(AdamState& state, std::span<double> theta, std::span<const double> grad);

/// Rectified Adam. While the variance rectification is undefined (the
/// approximated SMA length is <= 4) the update is plain bias-corrected
/// momentum without the adaptive denominator.
void radam_step(AdamState& state, std::span<double> theta, std::span<const double> grad);

/// True when radam_step at `step` (1-based) uses the adaptive denominator.
bool radam_rectified(long step, double beta2);

/// Value at theta; writes the gradient into `grad`. Non-finite values are
/// treated as rejected trial points by the line search.
using Objective = std::function<double(std::span<const double> theta, std::span<double> grad)>;

struct BfgsOptions {
  int max_iters = 100;
  double grad_tol = 1e-8;
  int max_backtracks = 50;
  double armijo_c1 = 1e-4;
  double contraction = 0.5;
  double initial_step = 1.0;
};

struct BfgsResult {
  std::vector<double> theta;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Line search could not find sufficient decrease; theta is best-so-far.
  bool line_search_failed = false;
  /// Objective after each accepted iterate.
  std::vector<double> history;
  /// Final inverse-Hessian approximation, row-major n x n.
  std::vector<double> inverse_hessian;
  /// Largest |H_ij - H_ji| observed after any update.
  double max_asymmetry = 0.0;
  int skipped_updates = 0;
};

/// Called after every accepted iterate with (iteration, value, theta).
using BfgsCallback = std::function<void(int, double, std::span<const double>)>;

/// Full-matrix inverse BFGS with backtracking Armijo line search. The
/// inverse-Hessian update is skipped when s.y <= 1e-10 |s||y|.
BfgsResult bfgs_minimize(const Objective& objective, std::vector<double> theta0,
                         const BfgsOptions& options, const BfgsCallback& on_iter = {});

}  // namespace lsciml
