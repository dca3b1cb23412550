#include "integrate.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"

namespace lsciml {

void IntegratorConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw ContractError("integrator step must be > 0");
  if (!(save_dt > 0.0) || !std::isfinite(save_dt))
    throw ContractError("integrator save_dt must be > 0");
  const double ratio = save_dt / step;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-9 * ratio)
    throw ContractError("save_dt (" + std::to_string(save_dt) +
                        ") must be a positive integer multiple of step (" + std::to_string(step) +
                        ")");
}

std::size_t IntegratorConfig::substeps() const {
  validate();
  return static_cast<std::size_t>(std::round(save_dt / step));
}

std::size_t grid_size(double t0, double t1, double save_dt) {
  if (!(t1 >= t0)) throw ContractError("time span end must not precede its start");
  return static_cast<std::size_t>(std::floor((t1 - t0) / save_dt + 1e-9)) + 1;
}

double grid_time(double t0, double save_dt, std::size_t k) {
  return t0 + static_cast<double>(k) * save_dt;
}

namespace {

State3 axpy(const State3& u, double a, const State3& k) {
  return {u[0] + a * k[0], u[1] + a * k[1], u[2] + a * k[2]};
}

State3 checked(const State3& k, double t) {
  if (!is_finite(k)) throw BlowupError(t, Trajectory{});
  return k;
}

}  // namespace

State3 rk4_step(const VectorField& field, const State3& u, double t, double h) {
  if (!(h > 0.0)) throw ContractError("rk4 step size must be > 0");
  const double half = 0.5 * h;
  const State3 k1 = checked(field(t, u), t);
  const State3 k2 = checked(field(t + half, axpy(u, half, k1)), t + half);
  const State3 k3 = checked(field(t + half, axpy(u, half, k2)), t + half);
  const State3 k4 = checked(field(t + h, axpy(u, h, k3)), t + h);
  const double w = h / 6.0;
  State3 out;
  for (std::size_t i = 0; i < 3; ++i)
    out[i] = u[i] + w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  if (!is_finite(out)) throw BlowupError(t + h, Trajectory{});
  return out;
}

Trajectory integrate(const VectorField& field, const State3& u0, double t0, double t1,
                     const IntegratorConfig& cfg) {
  const std::size_t substeps = cfg.substeps();
  const double h = cfg.effective_step();
  const std::size_t n = grid_size(t0, t1, cfg.save_dt);

  Trajectory traj;
  traj.times.reserve(n);
  traj.states.reserve(n);
  traj.push_back(t0, u0);

  State3 u = u0;
  for (std::size_t k = 1; k < n; ++k) {
    const double base = grid_time(t0, cfg.save_dt, k - 1);
    for (std::size_t j = 0; j < substeps; ++j) {
      const double t = base + static_cast<double>(j) * h;
      try {
        u = rk4_step(field, u, t, h);
      } catch (const BlowupError& e) {
        throw BlowupError(e.time(), std::move(traj));
      }
    }
    traj.push_back(grid_time(t0, cfg.save_dt, k), u);
  }
  return traj;
}

}  // namespace lsciml
