#include "trajectory.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "errors.hpp"

namespace lsciml {

bool is_finite(const State3& s) {
  return std::isfinite(s[0]) && std::isfinite(s[1]) && std::isfinite(s[2]);
}

void Trajectory::validate() const {
  if (times.size() != states.size())
    throw ContractError("trajectory has " + std::to_string(times.size()) + " times but " +
                        std::to_string(states.size()) + " states");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]))
      throw ContractError("trajectory time " + std::to_string(i) + " is not finite");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw ContractError("trajectory times not strictly increasing at index " + std::to_string(i));
    if (!is_finite(states[i]))
      throw ContractError("trajectory state at t=" + std::to_string(times[i]) + " is not finite");
  }
}

std::vector<double> Trajectory::component(std::size_t axis) const {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.at(axis));
  return out;
}

bool same_grid(const Trajectory& a, const Trajectory& b) { return a.times == b.times; }

void write_csv(std::ostream& os, const Trajectory& traj) {
  const auto old_precision = os.precision();
  os << "t,x,y,z\n" << std::setprecision(17);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj.states[i];
    os << traj.times[i] << ',' << s[0] << ',' << s[1] << ',' << s[2] << '\n';
  }
  os.precision(old_precision);
}

void write_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_csv(os, traj);
}

Trajectory read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "t,x,y,z")
    throw ContractError("trajectory CSV must start with header t,x,y,z");
  Trajectory traj;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::array<double, 4> v{};
    char sep = 0;
    row >> v[0] >> sep >> v[1] >> sep >> v[2] >> sep >> v[3];
    if (!row) throw ContractError("malformed trajectory row: " + line);
    traj.push_back(v[0], {v[1], v[2], v[3]});
  }
  return traj;
}

Trajectory read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_csv(is);
}

}  // namespace lsciml
