#include "optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "errors.hpp"

namespace lsciml {

namespace {

void check_lengths(const AdamState& s, std::span<double> theta, std::span<const double> grad) {
  if (theta.size() != grad.size() || s.m.size() != theta.size() || s.v.size() != theta.size())
    throw ContractError("optimizer state, parameters and gradient lengths differ");
}

// Updates moments and returns the bias corrections (1 - beta1^t, 1 - beta2^t).
std::pair<double, double> update_moments(AdamState& s, std::span<const double> grad) {
  ++s.step;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    s.m[i] = s.beta1 * s.m[i] + (1.0 - s.beta1) * grad[i];
    s.v[i] = s.beta2 * s.v[i] + (1.0 - s.beta2) * grad[i] * grad[i];
  }
  const double t = static_cast<double>(s.step);
  return {1.0 - std::pow(s.beta1, t), 1.0 - std::pow(s.beta2, t)};
}

double sma_length(long step, double beta2) {
  const double rho_inf = 2.0 / (1.0 - beta2) - 1.0;
  const double t = static_cast<double>(step);
  const double b2t = std::pow(beta2, t);
  return rho_inf - 2.0 * t * b2t / (1.0 - b2t);
}

}  // namespace

void adam_step(AdamState& s, std::span<double> theta, std::span<const double> grad) {
  check_lengths(s, theta, grad);
  const auto [bc1, bc2] = update_moments(s, grad);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double m_hat = s.m[i] / bc1;
    const double v_hat = s.v[i] / bc2;
    theta[i] -= s.lr * m_hat / (std::sqrt(v_hat) + s.eps);
  }
}

bool radam_rectified(long step, double beta2) { return sma_length(step, beta2) > 4.0; }

void radam_step(AdamState& s, std::span<double> theta, std::span<const double> grad) {
  check_lengths(s, theta, grad);
  const auto [bc1, bc2] = update_moments(s, grad);
  const double rho_inf = 2.0 / (1.0 - s.beta2) - 1.0;
  const double rho_t = sma_length(s.step, s.beta2);
  if (rho_t > 4.0) {
    const double r = std::sqrt((rho_t - 4.0) * (rho_t - 2.0) * rho_inf /
                               ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t));
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double m_hat = s.m[i] / bc1;
      const double v_hat = std::sqrt(s.v[i] / bc2);
      theta[i] -= s.lr * r * m_hat / (v_hat + s.eps);
    }
  } else {
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= s.lr * s.m[i] / bc1;
  }
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double inf_norm(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

void reset_identity(std::vector<double>& h, std::size_t n) {
  std::fill(h.begin(), h.end(), 0.0);
  for (std::size_t i = 0; i < n; ++i) h[i * n + i] = 1.0;
}

}  // namespace

BfgsResult bfgs_minimize(const Objective& objective, std::vector<double> theta0,
                         const BfgsOptions& opt, const BfgsCallback& on_iter) {
  const std::size_t n = theta0.size();
  BfgsResult res;
  res.theta = std::move(theta0);
  std::vector<double> grad(n);
  res.value = objective(res.theta, grad);
  if (!std::isfinite(res.value))
    throw ContractError("bfgs_minimize: objective is not finite at the starting point");

  std::vector<double> h(n * n);
  reset_identity(h, n);
  std::vector<double> dir(n), trial(n), trial_grad(n), s(n), y(n), hy(n);
  bool fresh = true;  // H is the identity; first step is rescaled after the update

  while (res.iterations < opt.max_iters) {
    if (inf_norm(grad) < opt.grad_tol) {
      res.converged = true;
      break;
    }
    // dir = -H g
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = &h[i * n];
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += row[j] * grad[j];
      dir[i] = -acc;
    }
    double slope = dot(grad, dir);
    if (!(slope < 0.0)) {
      reset_identity(h, n);
      fresh = true;
      for (std::size_t i = 0; i < n; ++i) dir[i] = -grad[i];
      slope = dot(grad, dir);
    }

    // Backtracking Armijo search.
    double alpha = opt.initial_step;
    double trial_value = 0.0;
    bool accepted = false;
    for (int bt = 0; bt <= opt.max_backtracks; ++bt) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = res.theta[i] + alpha * dir[i];
      trial_value = objective(trial, trial_grad);
      if (std::isfinite(trial_value) && trial_value <= res.value + opt.armijo_c1 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= opt.contraction;
    }
    if (!accepted) {
      res.line_search_failed = true;
      break;
    }

    for (std::size_t i = 0; i < n; ++i) {
      s[i] = trial[i] - res.theta[i];
      y[i] = trial_grad[i] - grad[i];
    }
    res.theta.swap(trial);
    grad.swap(trial_grad);
    res.value = trial_value;
    ++res.iterations;
    res.history.push_back(res.value);

    const double sy = dot(s, y);
    const double ns = std::sqrt(dot(s, s));
    const double ny = std::sqrt(dot(y, y));
    if (sy > 1e-10 * ns * ny) {
      if (fresh) {
        // Scale the initial identity to the observed curvature.
        const double gamma = sy / dot(y, y);
        for (std::size_t i = 0; i < n; ++i) h[i * n + i] = gamma;
        fresh = false;
      }
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i) {
        const double* row = &h[i * n];
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += row[j] * y[j];
        hy[i] = acc;
      }
      const double yhy = dot(y, hy);
      const double c = rho * rho * yhy + rho;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
          const double v = h[i * n + j] + c * (s[i] * s[j]) - rho * (hy[i] * s[j] + s[i] * hy[j]);
          h[i * n + j] = v;
          h[j * n + i] = v;
        }
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          res.max_asymmetry = std::max(res.max_asymmetry, std::abs(h[i * n + j] - h[j * n + i]));
    } else {
      ++res.skipped_updates;
    }
    if (on_iter) on_iter(res.iterations, res.value, res.theta);
  }
  if (!res.converged && inf_norm(grad) < opt.grad_tol) res.converged = true;
  res.inverse_hessian = std::move(h);
  return res;
}

}  // namespace lsciml
