#include "dynamics.hpp"

#include <cmath>

#include "errors.hpp"

namespace lsciml {

void LorenzParams::validate() const {
  if (!std::isfinite(sigma) || !std::isfinite(rho) || !std::isfinite(beta))
    throw ContractError("Lorenz parameters must be finite");
}

State3 lorenz_rhs(const State3& u, const LorenzParams& p) {
  const auto [x, y, z] = u;
  return {p.sigma * (y - x), x * (p.rho - z) - y, x * y - p.beta * z};
}

std::array<State3, 3> fixed_points(const LorenzParams& p) {
  const double c = std::sqrt(p.beta * (p.rho - 1.0));
  return {State3{0.0, 0.0, 0.0}, State3{c, c, p.rho - 1.0}, State3{-c, -c, p.rho - 1.0}};
}

Trajectory simulate_truth(const State3& u0, const LorenzParams& p, double t0, double t1,
                          double save_dt, double step) {
  p.validate();
  if (!is_finite(u0)) throw ContractError("initial state must be finite");
  const IntegratorConfig cfg{step, save_dt};
  return integrate([&p](double, const State3& u) { return lorenz_rhs(u, p); }, u0, t0, t1, cfg);
}

}  // namespace lsciml
