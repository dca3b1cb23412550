#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "trajectory.hpp"

namespace lsciml {

/// Caller broke a documented precondition (mismatched grids, bad dimensions).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configuration value is missing, malformed or out of range.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Integration produced a non-finite state.
class BlowupError : public std::runtime_error {
 public:
  BlowupError(double time, Trajectory partial)
      : std::runtime_error("integration blew up at t=" + std::to_string(time)),
        time_(time),
        partial_(std::move(partial)) {}
  double time() const noexcept { return time_; }
  /// Save-grid samples completed before the failure.
  const Trajectory& partial() const noexcept { return partial_; }

 private:
  double time_;
  Trajectory partial_;
};

/// Training could not recover from repeated rollout blowups.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& what, std::vector<double> history = {})
      : std::runtime_error(what), history_(std::move(history)) {}
  /// Loss history up to the point of divergence.
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

}  // namespace lsciml
