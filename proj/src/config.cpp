#include "config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace lsciml {

std::string_view to_string(ModelKind k) { return k == ModelKind::node ? "node" : "ude"; }

ModelKind parse_model_kind(std::string_view s) {
  if (s == "node") return ModelKind::node;
  if (s == "ude") return ModelKind::ude;
  throw ContractError("unknown model kind '" + std::string(s) + "'");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw ConfigError(key, "config key '" + key + "': " + why);
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out))
    bad(key, "expected a finite number, got '" + v + "'");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad(key, "expected an integer, got '" + v + "'");
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::vector<std::size_t> parse_hidden(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  if (v.empty() || v == "none") return out;
  for (const auto& part : split(v, 'x')) {
    const auto w = to_int(key, part);
    if (w <= 0) bad(key, "hidden widths must be positive");
    out.push_back(static_cast<std::size_t>(w));
  }
  return out;
}

std::string format_hidden(const std::vector<std::size_t>& h) {
  if (h.empty()) return "none";
  std::string s;
  for (std::size_t i = 0; i < h.size(); ++i) s += (i ? "x" : "") + std::to_string(h[i]);
  return s;
}

template <class F>
auto parse_enum(const std::string& key, const std::string& v, F&& f) {
  try {
    return f(v);
  } catch (const ContractError& e) {
    bad(key, e.what());
  }
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const std::string& v = value;
  if (key.rfind("sweep.", 0) == 0) {
    const std::string axis = key.substr(6);
    if (axis.empty() || axis == "kind" || axis.rfind("sweep", 0) == 0) bad(key, "not a sweepable key");
    std::vector<std::string> values;
    if (!trim(v).empty())
      for (auto& item : split(v, ',')) {
        if (item.empty()) bad(key, "empty value in sweep list");
        values.push_back(item);
      }
    // Validate each value against a scratch copy.
    ExperimentConfig probe = *this;
    for (const auto& item : values) probe.set(axis, item);
    sweep[axis] = std::move(values);
    return;
  }

  if (key == "kind") kind = parse_enum(key, v, parse_model_kind);
  else if (key == "sigma") lorenz.sigma = to_double(key, v);
  else if (key == "rho") lorenz.rho = to_double(key, v);
  else if (key == "beta") lorenz.beta = to_double(key, v);
  else if (key == "u0") {
    const auto parts = split(v, ',');
    if (parts.size() != 3) bad(key, "expected three comma-separated numbers");
    for (std::size_t i = 0; i < 3; ++i) u0[i] = to_double(key, parts[i]);
  } else if (key == "train_t0") train_t0 = to_double(key, v);
  else if (key == "train_t1") train_t1 = to_double(key, v);
  else if (key == "forecast_t1") forecast_t1 = to_double(key, v);
  else if (key == "save_dt") save_dt = to_double(key, v);
  else if (key == "step") step = to_double(key, v);
  else if (key == "hidden") hidden_layers = parse_hidden(key, v);
  else if (key == "activation") activation = parse_enum(key, v, parse_activation);
  else if (key == "optimizer") train.optimizer = parse_enum(key, v, parse_optimizer);
  else if (key == "learning_rate") train.learning_rate = to_double(key, v);
  else if (key == "iterations") train.iterations = static_cast<int>(to_int(key, v));
  else if (key == "seed") train.seed = static_cast<std::uint64_t>(to_int(key, v));
  else if (key == "adam_fraction") train.adam_fraction = to_double(key, v);
  else if (key == "bfgs_grad_tol") train.bfgs_grad_tol = to_double(key, v);
  else if (key == "max_blowup_streak") train.max_blowup_streak = static_cast<int>(to_int(key, v));
  else if (key == "horizon_stages") train.horizon_stages = static_cast<int>(to_int(key, v));
  else if (key == "noise_level") noise_level = to_double(key, v);
  else if (key == "noise_seed") noise_seed = static_cast<std::uint64_t>(to_int(key, v));
  else if (key == "breakdown_threshold") breakdown_threshold = to_double(key, v);
  else if (key == "input_mode") input_mode = parse_enum(key, v, parse_input_mode);
  else if (key == "eq7_form") eq7_form = parse_enum(key, v, parse_eq7_form);
  else if (key == "layout") layout = parse_enum(key, v, parse_net_layout);
  else if (key == "node_report") node_report = v;
  else if (key == "ude_report") ude_report = v;
  else bad(key, "unknown key");
}

void ExperimentConfig::validate() const {
  try {
    lorenz.validate();
  } catch (const ContractError& e) {
    bad("sigma", e.what());
  }
  if (!(train_t1 >= train_t0)) bad("train_t1", "must not precede train_t0");
  if (!(forecast_t1 >= train_t1)) bad("forecast_t1", "must not precede train_t1");
  if (!(save_dt > 0.0)) bad("save_dt", "must be > 0");
  if (!(step > 0.0)) bad("step", "must be > 0");
  try {
    IntegratorConfig{step, save_dt}.validate();
  } catch (const ContractError& e) {
    bad("save_dt", e.what());
  }
  if (train.iterations < 1) bad("iterations", "must be at least 1");
  if (!(train.learning_rate > 0.0)) bad("learning_rate", "must be > 0");
  if (!(train.adam_fraction >= 0.0 && train.adam_fraction <= 1.0))
    bad("adam_fraction", "must lie in [0, 1]");
  if (train.max_blowup_streak < 1) bad("max_blowup_streak", "must be >= 1");
  if (train.horizon_stages < 1) bad("horizon_stages", "must be >= 1");
  if (!(noise_level >= 0.0)) bad("noise_level", "must be >= 0");
  if (!(breakdown_threshold > 0.0)) bad("breakdown_threshold", "must be > 0");
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> e{
      {"kind", std::string(to_string(kind))},
      {"sigma", fmt(lorenz.sigma)},
      {"rho", fmt(lorenz.rho)},
      {"beta", fmt(lorenz.beta)},
      {"u0", fmt(u0[0]) + "," + fmt(u0[1]) + "," + fmt(u0[2])},
      {"train_t0", fmt(train_t0)},
      {"train_t1", fmt(train_t1)},
      {"forecast_t1", fmt(forecast_t1)},
      {"save_dt", fmt(save_dt)},
      {"step", fmt(step)},
      {"hidden", format_hidden(hidden_layers)},
      {"activation", std::string(to_string(activation))},
      {"optimizer", std::string(to_string(train.optimizer))},
      {"learning_rate", fmt(train.learning_rate)},
      {"iterations", std::to_string(train.iterations)},
      {"seed", std::to_string(train.seed)},
      {"adam_fraction", fmt(train.adam_fraction)},
      {"bfgs_grad_tol", fmt(train.bfgs_grad_tol)},
      {"max_blowup_streak", std::to_string(train.max_blowup_streak)},
      {"horizon_stages", std::to_string(train.horizon_stages)},
      {"noise_level", fmt(noise_level)},
      {"noise_seed", std::to_string(effective_noise_seed())},
      {"breakdown_threshold", fmt(breakdown_threshold)},
  };
  if (kind == ModelKind::ude) {
    e.emplace_back("input_mode", std::string(to_string(input_mode)));
    e.emplace_back("eq7_form", std::string(to_string(eq7_form)));
    e.emplace_back("layout", std::string(to_string(layout)));
  }
  return e;
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  for (const auto& [k, v] : entries()) out += k + " = " + v + "\n";
  for (const auto& [axis, values] : sweep) {
    out += "sweep." + axis + " = ";
    for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + values[i];
    out += "\n";
  }
  return out;
}

MlpSpec ExperimentConfig::node_spec() const { return MlpSpec{3, hidden_layers, 3, activation}; }

MlpSpec ExperimentConfig::ude_spec() const {
  return MlpSpec{input_mode == InputMode::time_and_state ? 4u : 3u, hidden_layers, 3, activation};
}

ExperimentConfig default_config(ModelKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  if (kind == ModelKind::ude) {
    c.train_t1 = 8.0;
    c.train.optimizer = OptimizerKind::adam_bfgs;
  }
  return c;
}

ExperimentConfig parse_config(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line, "config line " + std::to_string(lineno) + " ('" + line +
                                  "') is not of the form key = value");
    pairs.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  ModelKind kind = ModelKind::node;
  for (const auto& [k, v] : pairs)
    if (k == "kind") kind = parse_enum(k, v, parse_model_kind);
  ExperimentConfig cfg = default_config(kind);
  for (const auto& [k, v] : pairs) cfg.set(k, v);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config", "cannot read config file " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::vector<std::pair<std::string, ExperimentConfig>> expand_sweep(const ExperimentConfig& base) {
  if (base.sweep.empty()) throw ConfigError("sweep", "sweep grid is empty: no sweep.* keys");
  for (const auto& [axis, values] : base.sweep)
    if (values.empty()) throw ConfigError("sweep." + axis, "sweep grid is empty: sweep." + axis + " has no values");

  std::vector<std::pair<std::string, ExperimentConfig>> arms;
  ExperimentConfig root = base;
  root.sweep.clear();
  arms.emplace_back("", root);
  for (const auto& [axis, values] : base.sweep) {
    std::vector<std::pair<std::string, ExperimentConfig>> next;
    for (const auto& [name, cfg] : arms)
      for (const auto& value : values) {
        ExperimentConfig c = cfg;
        c.set(axis, value);
        next.emplace_back(name + (name.empty() ? "" : "_") + axis + "-" + value, std::move(c));
      }
    arms = std::move(next);
  }
  for (std::size_t i = 0; i < arms.size(); ++i) {
    char prefix[16];
    std::snprintf(prefix, sizeof prefix, "arm%02zu_", i);
    arms[i].first = prefix + arms[i].first;
  }
  return arms;
}

}  // namespace lsciml
