#pragma once

#include <cstddef>
#include <functional>

#include "trajectory.hpp"

namespace lsciml {

/// du/dt = field(t, u).
using VectorField = std::function<State3(double t, const State3& u)>;

/// Fixed-step RK4 settings. `save_dt` must be a positive integer multiple of
/// `step`; the step actually taken is save_dt / substeps() so that save
/// points land exactly on the output grid.
struct IntegratorConfig {
  double step = 0.01;
  double save_dt = 0.1;

  void validate() const;
  std::size_t substeps() const;
  double effective_step() const { return save_dt / static_cast<double>(substeps()); }
};

/// Output grid t0, t0 + save_dt, ... up to t1 (inclusive when aligned).
std::size_t grid_size(double t0, double t1, double save_dt);
double grid_time(double t0, double save_dt, std::size_t k);

/// One classical RK4 step. Throws BlowupError if any stage is non-finite.
State3 rk4_step(const VectorField& field, const State3& u, double t, double h);

/// Composes rk4_step over [t0, t1], saving on the save_dt grid. The first
/// sample is u0 exactly. Blowups carry the partial trajectory.
Trajectory integrate(const VectorField& field, const State3& u0, double t0, double t1,
                     const IntegratorConfig& cfg);

}  // namespace lsciml
