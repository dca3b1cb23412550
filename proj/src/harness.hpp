#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "train.hpp"
#include "trajectory.hpp"
#include "ude.hpp"

namespace lsciml {

struct NoiseConfig {
  double level = 0.0;  ///< Gaussian standard deviation in state units
  std::uint64_t seed = 0;
};

/// Adds i.i.d. N(0, level^2) to every state component; times unchanged.
Trajectory add_noise(const Trajectory& traj, const NoiseConfig& cfg);

struct BreakdownReport {
  double train_end = 0.0;
  std::optional<double> breakdown_time;
  double threshold = 0.2;
  double scale = 0.0;  ///< truth bounding-box diagonal
  std::vector<double> times;
  std::vector<double> error_series;
};

/// Length of the diagonal of the axis-aligned box enclosing all states.
double bounding_box_diagonal(const Trajectory& traj);

/// e(t) = |pred(t) - truth(t)|_2 / D with D the truth bounding-box diagonal;
/// breakdown is the first save point where e(t) > threshold.
BreakdownReport detect_breakdown(const Trajectory& pred, const Trajectory& truth,
                                 double threshold, double train_end);

/// Mean/std-dev/normalized-RMSE of the learned UDE terms.
struct RecoverySummary {
  State3 normalized_rmse{};
};

/// Results of one train-and-forecast experiment.
struct ExperimentReport {
  ExperimentConfig config;
  std::string name;
  bool ok = true;
  std::string error;  ///< set when ok is false
  int exit_status = 0;
  std::vector<double> loss_history;
  double final_loss = 0.0;
  double first_order_loss = 0.0;
  int first_order_iterations = 0;
  int bfgs_iterations = 0;
  BreakdownReport breakdown;
  std::optional<RecoverySummary> recovery;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
  std::string init_scheme = "glorot_uniform";
};

/// Everything an experiment produces, including series for plotting.
struct ExperimentOutcome {
  ExperimentReport report;
  FlatParams theta;
  MlpSpec spec;
  Trajectory truth;         ///< clean truth over the forecast horizon
  Trajectory train_target;  ///< (possibly noisy) training data
  Trajectory prediction;    ///< rollout over the training span
  Trajectory forecast;      ///< rollout over the forecast horizon (may be partial)
  std::optional<ResidualSamples> residuals;
};

/// Simulates truth, trains, forecasts, detects breakdown and (UDE) recovers
/// terms. Training divergence is reported through report.ok/exit_status 4.
ExperimentOutcome run_experiment(const ExperimentConfig& config, const ProgressFn& progress = {});

/// Writes report.json, loss.csv, trajectory_*.csv, breakdown.csv,
/// theta.json and (UDE) residuals.csv into `dir`.
void write_outcome(const ExperimentOutcome& outcome, const std::filesystem::path& dir);

/// Runs every configuration (up to `workers` at a time) and returns reports
/// sorted by final loss, failed arms last. Arm failures never abort.
/// When `out_dir` is set each arm's outcome is written to out_dir/<name>.
std::vector<ExperimentReport> run_sweep(
    const std::vector<std::pair<std::string, ExperimentConfig>>& grid, int workers,
    const std::optional<std::filesystem::path>& out_dir = std::nullopt);

void write_summary_csv(const std::vector<ExperimentReport>& reports,
                       const std::filesystem::path& path);

/// Per-model row of a comparison.
struct ModelSummary {
  std::string model;
  double final_loss = 0.0;
  double train_end = 0.0;
  std::optional<double> breakdown_time;
  /// (breakdown - train_end) / train_end; empty when no breakdown occurred
  /// within the forecast horizon.
  std::optional<double> beyond_training_ratio;
};

inline constexpr const char* kBeyondHorizon = "beyond_horizon";

struct Comparison {
  ModelSummary node;
  ModelSummary ude;
};

ModelSummary summarize(const ExperimentReport& report);
Comparison compare_models(const ExperimentReport& node_report, const ExperimentReport& ude_report);
void write_comparison(const Comparison& c, const std::filesystem::path& dir);

/// JSON round trip of the scalar parts of a report (what compare reads).
std::string report_to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const std::string& text);
ExperimentReport load_report(const std::filesystem::path& report_dir);

/// Creates `dir`; it must not exist or be empty unless `overwrite`.
/// Throws ConfigError("--out", ...) otherwise.
void prepare_output_dir(const std::filesystem::path& dir, bool overwrite);

}  // namespace lsciml
