#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace lsciml {

/// (x, y, z) state of the three-variable system.
using State3 = std::array<double, 3>;

bool is_finite(const State3& s);

/// Time grid plus one state per time.
struct Trajectory {
  std::vector<double> times;
  std::vector<State3> states;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  void push_back(double t, const State3& s) {
    times.push_back(t);
    states.push_back(s);
  }

  /// Throws ContractError unless times strictly increase, lengths agree
  /// and every state is finite.
  void validate() const;

  /// Per-axis component series, e.g. component(0) is x(t).
  std::vector<double> component(std::size_t axis) const;
};

/// Exact grid equality (same length, bit-identical times).
bool same_grid(const Trajectory& a, const Trajectory& b);

/// `t,x,y,z` with 17 significant digits.
void write_csv(std::ostream& os, const Trajectory& traj);
void write_csv(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_csv(std::istream& is);
Trajectory read_csv(const std::filesystem::path& path);

}  // namespace lsciml
