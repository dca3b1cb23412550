#pragma once

#include <array>

#include "integrate.hpp"
#include "trajectory.hpp"

namespace lsciml {

/// Physical constants of the Lorenz system.
struct LorenzParams {
  double sigma = 10.0;        ///< Prandtl number
  double rho = 28.0;          ///< Rayleigh number
  double beta = 8.0 / 3.0;    ///< geometric factor

  static LorenzParams canonical() { return {}; }
  void validate() const;
};

/// (sigma (y - x), x (rho - z) - y, x y - beta z)
State3 lorenz_rhs(const State3& u, const LorenzParams& p);

/// Origin plus the two symmetric convection fixed points.
std::array<State3, 3> fixed_points(const LorenzParams& p);

/// Reference integrator used for ground-truth data.
inline constexpr double kTruthStep = 0.01;
inline constexpr State3 kDefaultU0{1.0, 0.0, 0.0};

/// Ground truth on the save_dt grid using RK4 with step `step`.
Trajectory simulate_truth(const State3& u0, const LorenzParams& p, double t0, double t1,
                          double save_dt, double step = kTruthStep);

}  // namespace lsciml
