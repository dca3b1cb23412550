#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "autodiff.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "node.hpp"

namespace lsciml {

using json = nlohmann::json;

Trajectory add_noise(const Trajectory& traj, const NoiseConfig& cfg) {
  if (!(cfg.level >= 0.0)) throw ContractError("noise level must be >= 0");
  Trajectory out = traj;
  if (cfg.level == 0.0) return out;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> dist(0.0, cfg.level);
  for (auto& s : out.states)
    for (auto& v : s) v += dist(rng);
  return out;
}

double bounding_box_diagonal(const Trajectory& traj) {
  if (traj.empty()) return 0.0;
  State3 lo = traj.states.front(), hi = lo;
  for (const auto& s : traj.states)
    for (std::size_t c = 0; c < 3; ++c) {
      lo[c] = std::min(lo[c], s[c]);
      hi[c] = std::max(hi[c], s[c]);
    }
  return std::hypot(hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]);
}

BreakdownReport detect_breakdown(const Trajectory& pred, const Trajectory& truth,
                                 double threshold, double train_end) {
  if (!same_grid(pred, truth)) throw ContractError("detect_breakdown: grids differ");
  if (!(threshold > 0.0) || !std::isfinite(threshold))
    throw ContractError("breakdown threshold must be a positive finite number");
  BreakdownReport r;
  r.train_end = train_end;
  r.threshold = threshold;
  r.scale = bounding_box_diagonal(truth);
  const double scale = r.scale > 0.0 ? r.scale : 1.0;
  r.times = truth.times;
  r.error_series.reserve(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto& p = pred.states[i];
    const auto& t = truth.states[i];
    const double e = std::hypot(p[0] - t[0], p[1] - t[1], p[2] - t[2]) / scale;
    r.error_series.push_back(e);
    if (!r.breakdown_time && e > threshold) r.breakdown_time = truth.times[i];
  }
  return r;
}

namespace {

// Forecast truncated by a blowup: samples past the failure count as +inf error.
BreakdownReport breakdown_with_partial(const Trajectory& forecast, const Trajectory& truth,
                                       double threshold, double train_end) {
  Trajectory padded = forecast;
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = forecast.size(); i < truth.size(); ++i)
    padded.push_back(truth.times[i], {inf, inf, inf});
  BreakdownReport r = detect_breakdown(padded, truth, threshold, train_end);
  return r;
}

Trajectory slice_until(const Trajectory& t, std::size_t n) {
  Trajectory out;
  out.times.assign(t.times.begin(), t.times.begin() + static_cast<std::ptrdiff_t>(n));
  out.states.assign(t.states.begin(), t.states.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();
  ExperimentOutcome out;
  ExperimentReport& rep = out.report;
  rep.config = cfg;
  rep.seed = cfg.train.seed;

  // Truth over the whole forecast horizon; the training grid is its prefix.
  out.truth = simulate_truth(cfg.u0, cfg.lorenz, cfg.train_t0, cfg.forecast_t1, cfg.save_dt,
                             cfg.step);
  const std::size_t n_train = grid_size(cfg.train_t0, cfg.train_t1, cfg.save_dt);
  out.train_target = add_noise(slice_until(out.truth, n_train),
                               {cfg.noise_level, cfg.effective_noise_seed()});

  std::unique_ptr<DifferentiableField> field;
  RolloutProblem rp{cfg.u0, cfg.train_t0, cfg.train_t1, {cfg.step, cfg.save_dt}};
  UdeProblem ude;
  if (cfg.kind == ModelKind::node) {
    NodeProblem p{cfg.node_spec(), cfg.u0, cfg.train_t0, cfg.train_t1, cfg.save_dt, cfg.step,
                  out.train_target};
    p.validate();
    out.spec = p.spec;
    field = std::make_unique<NodeField>(p.spec);
  } else {
    ude.spec = cfg.ude_spec();
    ude.input_mode = cfg.input_mode;
    ude.eq7_form = cfg.eq7_form;
    ude.layout = cfg.layout;
    ude.params = cfg.lorenz;
    ude.u0 = cfg.u0;
    ude.t0 = cfg.train_t0;
    ude.t1 = cfg.train_t1;
    ude.save_dt = cfg.save_dt;
    ude.step = cfg.step;
    ude.truth = out.train_target;
    ude.validate();
    out.spec = ude.spec;
    field = std::make_unique<UdeField>(ude);
  }

  TrainResult tr;
  try {
    FlatParams theta0 = cfg.kind == ModelKind::node ? init_params(out.spec, cfg.train.seed)
                                                    : init_ude_params(ude, cfg.train.seed);
    tr = train_field(*field, std::move(theta0), rp, out.train_target, cfg.train, progress);
  } catch (const DivergenceError& e) {
    rep.ok = false;
    rep.error = e.what();
    rep.exit_status = 4;
    rep.loss_history = e.history();
    rep.final_loss = std::numeric_limits<double>::infinity();
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return out;
  }
  rep.loss_history = tr.loss_history;
  rep.final_loss = tr.final_loss;
  rep.first_order_loss = tr.first_order_loss;
  rep.first_order_iterations = tr.first_order_iterations;
  rep.bfgs_iterations = tr.bfgs_iterations;
  out.theta = tr.theta;

  out.prediction = rollout(*field, out.theta, rp);
  RolloutProblem fp = rp;
  fp.t1 = cfg.forecast_t1;
  try {
    out.forecast = rollout(*field, out.theta, fp);
    rep.breakdown = detect_breakdown(out.forecast, out.truth, cfg.breakdown_threshold,
                                     cfg.train_t1);
  } catch (const BlowupError& e) {
    out.forecast = e.partial();
    rep.breakdown = breakdown_with_partial(out.forecast, out.truth, cfg.breakdown_threshold,
                                           cfg.train_t1);
  }

  if (cfg.kind == ModelKind::ude) {
    // Recovery is judged against the clean truth states.
    UdeProblem clean = ude;
    clean.truth = slice_until(out.truth, n_train);
    out.residuals = recover_terms(clean, out.theta);
    rep.recovery = RecoverySummary{out.residuals->normalized_rmse()};
  }
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

json spec_json(const MlpSpec& s) {
  return {{"input_dim", s.input_dim},
          {"hidden_layers", s.hidden_layers},
          {"output_dim", s.output_dim},
          {"activation", std::string(to_string(s.activation))}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << text;
}

}  // namespace

std::string report_to_json(const ExperimentReport& r) {
  json cfg = json::object();
  for (const auto& [k, v] : r.config.entries()) cfg[k] = v;
  json j;
  j["name"] = r.name;
  j["kind"] = std::string(to_string(r.config.kind));
  j["ok"] = r.ok;
  j["error"] = r.error;
  j["exit_status"] = r.exit_status;
  j["config"] = cfg;
  j["config_text"] = r.config.to_text();
  j["seed"] = r.seed;
  j["init_scheme"] = r.init_scheme;
  j["iterations_run"] = r.loss_history.size();
  j["initial_loss"] = r.loss_history.empty() ? json(nullptr) : number_or_null(r.loss_history.front());
  j["final_loss"] = number_or_null(r.final_loss);
  j["first_order_loss"] = number_or_null(r.first_order_loss);
  j["first_order_iterations"] = r.first_order_iterations;
  j["bfgs_iterations"] = r.bfgs_iterations;
  j["wall_seconds"] = r.wall_seconds;
  j["breakdown"] = {{"train_end", r.breakdown.train_end},
                    {"threshold", r.breakdown.threshold},
                    {"scale", r.breakdown.scale},
                    {"breakdown_time", r.breakdown.breakdown_time
                                           ? json(*r.breakdown.breakdown_time)
                                           : json(nullptr)}};
  if (r.recovery) {
    const auto& e = r.recovery->normalized_rmse;
    j["recovery"] = {{"normalized_rmse", {number_or_null(e[0]), number_or_null(e[1]), number_or_null(e[2])}}};
  }
  return j.dump(2) + "\n";
}

ExperimentReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("report.json", std::string("malformed report.json: ") + e.what());
  }
  ExperimentReport r;
  try {
    r.config = parse_config(j.at("config_text").get<std::string>());
    r.name = j.value("name", "");
    r.ok = j.at("ok").get<bool>();
    r.error = j.value("error", "");
    r.exit_status = j.value("exit_status", 0);
    r.seed = j.at("seed").get<std::uint64_t>();
    r.init_scheme = j.value("init_scheme", "glorot_uniform");
    r.final_loss = number_from(j.at("final_loss"));
    r.first_order_loss = number_from(j.at("first_order_loss"));
    r.first_order_iterations = j.value("first_order_iterations", 0);
    r.bfgs_iterations = j.value("bfgs_iterations", 0);
    r.wall_seconds = j.value("wall_seconds", 0.0);
    const auto& b = j.at("breakdown");
    r.breakdown.train_end = b.at("train_end").get<double>();
    r.breakdown.threshold = b.at("threshold").get<double>();
    r.breakdown.scale = b.at("scale").get<double>();
    if (!b.at("breakdown_time").is_null())
      r.breakdown.breakdown_time = b.at("breakdown_time").get<double>();
    if (j.contains("recovery")) {
      const auto& e = j["recovery"].at("normalized_rmse");
      r.recovery = RecoverySummary{{number_from(e.at(0)), number_from(e.at(1)), number_from(e.at(2))}};
    }
  } catch (const json::exception& e) {
    throw ConfigError("report.json", std::string("incomplete report.json: ") + e.what());
  }
  return r;
}

ExperimentReport load_report(const std::filesystem::path& dir) {
  std::ifstream is(dir / "report.json");
  if (!is) throw ConfigError("report.json", "cannot read " + (dir / "report.json").string());
  std::stringstream ss;
  ss << is.rdbuf();
  auto report = report_from_json(ss.str());
  std::ifstream loss(dir / "loss.csv");
  std::string line;
  if (loss && std::getline(loss, line)) {
    while (std::getline(loss, line)) {
      const auto comma = line.find(',');
      if (comma == std::string::npos) continue;
      try {
        report.loss_history.push_back(std::stod(line.substr(comma + 1)));
      } catch (const std::exception&) {
        report.loss_history.push_back(std::numeric_limits<double>::infinity());
      }
    }
  }
  return report;
}

void write_outcome(const ExperimentOutcome& o, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "report.json", report_to_json(o.report));
  write_text(dir / "config.txt", o.report.config.to_text());

  {
    std::ofstream os(dir / "loss.csv");
    os << "iter,loss\n" << std::setprecision(17);
    for (std::size_t i = 0; i < o.report.loss_history.size(); ++i)
      os << i + 1 << ',' << o.report.loss_history[i] << '\n';
  }
  write_csv(dir / "trajectory_truth.csv", o.truth);
  write_csv(dir / "trajectory_train.csv", o.train_target);
  if (!o.report.ok) return;

  write_csv(dir / "trajectory_pred.csv", o.prediction);
  write_csv(dir / "trajectory_forecast.csv", o.forecast);
  {
    std::ofstream os(dir / "breakdown.csv");
    os << "t,normalized_error\n" << std::setprecision(17);
    for (std::size_t i = 0; i < o.report.breakdown.times.size(); ++i)
      os << o.report.breakdown.times[i] << ',' << o.report.breakdown.error_series[i] << '\n';
  }
  json ck{{"spec", spec_json(o.spec)}, {"theta", o.theta}};
  if (o.report.config.kind == ModelKind::ude) {
    ck["input_mode"] = std::string(to_string(o.report.config.input_mode));
    ck["eq7_form"] = std::string(to_string(o.report.config.eq7_form));
    ck["layout"] = std::string(to_string(o.report.config.layout));
  }
  write_text(dir / "theta.json", ck.dump() + "\n");
  if (o.residuals) {
    std::ofstream os(dir / "residuals.csv");
    os << "t,nn1,g1,nn2,g2,nn3,g3\n" << std::setprecision(17);
    const auto& r = *o.residuals;
    for (std::size_t i = 0; i < r.size(); ++i) {
      os << r.times[i];
      for (std::size_t c = 0; c < 3; ++c) os << ',' << r.learned[i][c] << ',' << r.target[i][c];
      os << '\n';
    }
  }
}

std::vector<ExperimentReport> run_sweep(
    const std::vector<std::pair<std::string, ExperimentConfig>>& grid, int workers,
    const std::optional<std::filesystem::path>& out_dir) {
  if (grid.empty()) throw ConfigError("sweep", "sweep grid is empty");
  std::vector<ExperimentReport> reports(grid.size());
  std::atomic<std::size_t> next{0};
  std::mutex io;

  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      const auto& [name, cfg] = grid[i];
      ExperimentReport rep;
      try {
        ExperimentOutcome o = run_experiment(cfg);
        o.report.name = name;
        if (out_dir) write_outcome(o, *out_dir / name);
        rep = std::move(o.report);
      } catch (const std::exception& e) {
        rep.config = cfg;
        rep.seed = cfg.train.seed;
        rep.ok = false;
        rep.error = e.what();
        rep.exit_status = dynamic_cast<const BlowupError*>(&e) ? 3 : 2;
        rep.final_loss = std::numeric_limits<double>::infinity();
        if (out_dir) {
          std::lock_guard lock(io);
          std::filesystem::create_directories(*out_dir / name);
          rep.name = name;
          write_text(*out_dir / name / "report.json", report_to_json(rep));
        }
      }
      rep.name = name;
      reports[i] = std::move(rep);
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(grid.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < n; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::stable_sort(reports.begin(), reports.end(), [](const auto& a, const auto& b) {
    if (a.ok != b.ok) return a.ok;
    return a.final_loss < b.final_loss;
  });
  return reports;
}

void write_summary_csv(const std::vector<ExperimentReport>& reports,
                       const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << "rank,name,ok,final_loss,breakdown_time,wall_seconds,activation,hidden,optimizer,"
        "learning_rate,iterations,seed\n"
     << std::setprecision(17);
  int rank = 1;
  for (const auto& r : reports) {
    const auto entries = r.config.entries();
    std::map<std::string, std::string> e(entries.begin(), entries.end());
    os << rank++ << ',' << r.name << ',' << (r.ok ? 1 : 0) << ',' << r.final_loss << ',';
    if (r.breakdown.breakdown_time) os << *r.breakdown.breakdown_time;
    else os << kBeyondHorizon;
    os << ',' << r.wall_seconds << ',' << e["activation"] << ',' << e["hidden"] << ','
       << e["optimizer"] << ',' << e["learning_rate"] << ',' << e["iterations"] << ','
       << e["seed"] << '\n';
  }
}

ModelSummary summarize(const ExperimentReport& r) {
  ModelSummary s;
  s.model = std::string(to_string(r.config.kind));
  s.final_loss = r.final_loss;
  s.train_end = r.breakdown.train_end;
  s.breakdown_time = r.breakdown.breakdown_time;
  if (s.breakdown_time && s.train_end > 0.0)
    s.beyond_training_ratio = (*s.breakdown_time - s.train_end) / s.train_end;
  return s;
}

Comparison compare_models(const ExperimentReport& node_report, const ExperimentReport& ude_report) {
  return {summarize(node_report), summarize(ude_report)};
}

void write_comparison(const Comparison& c, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream os(dir / "comparison.csv");
  os << "model,final_loss,train_end,breakdown_time,beyond_training_ratio\n" << std::setprecision(17);
  json arr = json::array();
  for (const ModelSummary* s : {&c.node, &c.ude}) {
    os << s->model << ',' << s->final_loss << ',' << s->train_end << ',';
    if (s->breakdown_time) os << *s->breakdown_time;
    else os << kBeyondHorizon;
    os << ',';
    if (s->beyond_training_ratio) os << *s->beyond_training_ratio;
    else os << kBeyondHorizon;
    os << '\n';
    arr.push_back({{"model", s->model},
                   {"final_loss", number_or_null(s->final_loss)},
                   {"train_end", s->train_end},
                   {"breakdown_time", s->breakdown_time ? json(*s->breakdown_time) : json(kBeyondHorizon)},
                   {"beyond_training_ratio",
                    s->beyond_training_ratio ? json(*s->beyond_training_ratio) : json(kBeyondHorizon)}});
  }
  write_text(dir / "comparison.json", arr.dump(2) + "\n");
}

void prepare_output_dir(const std::filesystem::path& dir, bool overwrite) {
  namespace fs = std::filesystem;
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw ConfigError("--out", dir.string() + " exists and is not a directory");
    if (!fs::is_empty(dir)) {
      if (!overwrite)
        throw ConfigError("--out", "output directory " + dir.string() +
                                       " is not empty (pass --overwrite to replace it)");
      fs::remove_all(dir);
    }
  }
  fs::create_directories(dir);
}

}  // namespace lsciml
