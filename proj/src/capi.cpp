#include "lsciml/lsciml.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "config.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "harness.hpp"

struct lsciml_trajectory {
  lsciml::Trajectory traj;
};

struct lsciml_config {
  lsciml::ExperimentConfig cfg;
};

struct lsciml_report {
  lsciml::ExperimentReport report;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_key;

lsciml_status fail(lsciml_status s, const std::string& msg, const std::string& key = {}) {
  g_last_error = msg;
  g_last_key = key;
  return s;
}

// Runs `f`, translating exceptions into status codes.
template <class F>
lsciml_status guarded(F&& f) {
  g_last_error.clear();
  g_last_key.clear();
  try {
    return f();
  } catch (const lsciml::ConfigError& e) {
    return fail(LSCIML_ERR_CONFIG, e.what(), e.key());
  } catch (const lsciml::BlowupError& e) {
    return fail(LSCIML_ERR_BLOWUP, e.what());
  } catch (const lsciml::DivergenceError& e) {
    return fail(LSCIML_ERR_DIVERGED, e.what());
  } catch (const lsciml::ContractError& e) {
    return fail(LSCIML_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(LSCIML_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(LSCIML_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LSCIML_ERR_IO, e.what());
  } catch (...) {
    return fail(LSCIML_ERR_INTERNAL, "unknown error");
  }
}

lsciml_status null_arg(const char* name) {
  return fail(LSCIML_ERR_INVALID_ARGUMENT, std::string(name) + " must not be NULL");
}

bool names_kind(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=', first);
    if (eq == std::string::npos) continue;
    auto key = line.substr(first, eq - first);
    key.erase(key.find_last_not_of(" \t") + 1);
    if (key == "kind") return true;
  }
  return false;
}

std::string kind_mismatch(lsciml::ModelKind have, lsciml::ModelKind want) {
  return "config key 'kind': config is " + std::string(lsciml::to_string(have)) +
         " but the command expects " + std::string(lsciml::to_string(want));
}

lsciml::ExperimentConfig parse_for(const std::string& text, lsciml_kind kind) {
  auto cfg = lsciml::parse_config(text);
  if (kind == LSCIML_KIND_ANY) return cfg;
  const auto want = kind == LSCIML_KIND_UDE ? lsciml::ModelKind::ude : lsciml::ModelKind::node;
  if (cfg.kind == want) return cfg;
  if (names_kind(text)) throw lsciml::ConfigError("kind", kind_mismatch(cfg.kind, want));
  return lsciml::parse_config("kind = " + std::string(lsciml::to_string(want)) + "\n" + text);
}

}  // namespace

extern "C" {

const char* lsciml_version(void) { return "0.1.0"; }
const char* lsciml_last_error(void) { return g_last_error.c_str(); }
const char* lsciml_last_error_key(void) { return g_last_key.c_str(); }

lsciml_status lsciml_lorenz_rhs(const double state[3], double sigma, double rho, double beta,
                                double out[3]) {
  if (!state || !out) return null_arg("state/out");
  return guarded([&] {
    const auto d = lsciml::lorenz_rhs({state[0], state[1], state[2]}, {sigma, rho, beta});
    std::memcpy(out, d.data(), sizeof(double) * 3);
    return LSCIML_OK;
  });
}

lsciml_status lsciml_simulate(const double u0[3], double sigma, double rho, double beta,
                              double t0, double t1, double save_dt, lsciml_trajectory** out) {
  if (!u0 || !out) return null_arg("u0/out");
  *out = nullptr;
  return guarded([&] {
    auto traj = lsciml::simulate_truth({u0[0], u0[1], u0[2]}, {sigma, rho, beta}, t0, t1, save_dt);
    *out = new lsciml_trajectory{std::move(traj)};
    return LSCIML_OK;
  });
}

size_t lsciml_trajectory_size(const lsciml_trajectory* traj) {
  return traj ? traj->traj.size() : 0;
}

lsciml_status lsciml_trajectory_sample(const lsciml_trajectory* traj, size_t index,
                                       double* time, double state[3]) {
  if (!traj) return null_arg("traj");
  if (index >= traj->traj.size())
    return fail(LSCIML_ERR_INVALID_ARGUMENT, "sample index out of range");
  if (time) *time = traj->traj.times[index];
  if (state) std::memcpy(state, traj->traj.states[index].data(), sizeof(double) * 3);
  return LSCIML_OK;
}

lsciml_status lsciml_trajectory_write_csv(const lsciml_trajectory* traj, const char* path) {
  if (!traj || !path) return null_arg("traj/path");
  return guarded([&] {
    lsciml::write_csv(std::filesystem::path(path), traj->traj);
    return LSCIML_OK;
  });
}

void lsciml_trajectory_free(lsciml_trajectory* traj) { delete traj; }

lsciml_status lsciml_config_parse(const char* text, lsciml_kind kind, lsciml_config** out) {
  if (!text || !out) return null_arg("text/out");
  *out = nullptr;
  return guarded([&] {
    *out = new lsciml_config{parse_for(text, kind)};
    return LSCIML_OK;
  });
}

lsciml_status lsciml_config_load(const char* path, lsciml_kind kind, lsciml_config** out) {
  if (!path || !out) return null_arg("path/out");
  *out = nullptr;
  return guarded([&] {
    std::ifstream is(path);
    if (!is) throw lsciml::ConfigError("--config", std::string("cannot read config file ") + path);
    std::stringstream ss;
    ss << is.rdbuf();
    *out = new lsciml_config{parse_for(ss.str(), kind)};
    return LSCIML_OK;
  });
}

lsciml_status lsciml_config_set(lsciml_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return null_arg("config/key/value");
  return guarded([&] {
    config->cfg.set(key, value);
    return LSCIML_OK;
  });
}

size_t lsciml_config_dump(const lsciml_config* config, char* buffer, size_t size) {
  if (!config) return 0;
  const std::string text = config->cfg.to_text();
  if (buffer && size > 0) {
    const std::size_t n = std::min(size - 1, text.size());
    std::memcpy(buffer, text.data(), n);
    buffer[n] = '\0';
  }
  return text.size() + 1;
}

void lsciml_config_free(lsciml_config* config) { delete config; }

lsciml_status lsciml_prepare_output_dir(const char* dir, int overwrite) {
  if (!dir) return null_arg("dir");
  return guarded([&] {
    lsciml::prepare_output_dir(dir, overwrite != 0);
    return LSCIML_OK;
  });
}

lsciml_status lsciml_cmd_simulate(const lsciml_config* config, const char* out_dir) {
  if (!config || !out_dir) return null_arg("config/out_dir");
  return guarded([&] {
    const auto& c = config->cfg;
    c.validate();
    auto traj = lsciml::simulate_truth(c.u0, c.lorenz, c.train_t0, c.train_t1, c.save_dt, c.step);
    std::filesystem::create_directories(out_dir);
    lsciml::write_csv(std::filesystem::path(out_dir) / "trajectory.csv", traj);
    return LSCIML_OK;
  });
}

lsciml_status lsciml_cmd_train(const lsciml_config* config, lsciml_kind kind, const char* out_dir,
                               lsciml_progress_fn progress, void* user_data,
                               lsciml_report** report) {
  if (!config || !out_dir) return null_arg("config/out_dir");
  if (report) *report = nullptr;
  return guarded([&] {
    auto cfg = config->cfg;
    if (kind != LSCIML_KIND_ANY) {
      const auto want = kind == LSCIML_KIND_UDE ? lsciml::ModelKind::ude : lsciml::ModelKind::node;
      if (cfg.kind != want) throw lsciml::ConfigError("kind", kind_mismatch(cfg.kind, want));
    }
    lsciml::ProgressFn fn;
    if (progress) fn = [&](int it, double loss) { progress(it, loss, user_data); };
    auto outcome = lsciml::run_experiment(cfg, fn);
    outcome.report.name = std::filesystem::path(out_dir).filename().string();
    lsciml::write_outcome(outcome, out_dir);
    const int status = outcome.report.exit_status;
    const std::string error = outcome.report.error;
    if (report) *report = new lsciml_report{std::move(outcome.report)};
    if (status == LSCIML_ERR_DIVERGED) return fail(LSCIML_ERR_DIVERGED, error);
    return LSCIML_OK;
  });
}

lsciml_status lsciml_cmd_sweep(const lsciml_config* config, const char* out_dir, int workers) {
  if (!config || !out_dir) return null_arg("config/out_dir");
  return guarded([&] {
    config->cfg.validate();
    const auto grid = lsciml::expand_sweep(config->cfg);
    for (const auto& [name, cfg] : grid) cfg.validate();
    std::filesystem::create_directories(out_dir);
    const auto reports = lsciml::run_sweep(grid, workers, std::filesystem::path(out_dir));
    lsciml::write_summary_csv(reports, std::filesystem::path(out_dir) / "summary.csv");
    return LSCIML_OK;
  });
}

lsciml_status lsciml_cmd_compare(const char* node_report_dir, const char* ude_report_dir,
                                 const char* out_dir) {
  if (!node_report_dir || !ude_report_dir || !out_dir) return null_arg("report dirs/out_dir");
  return guarded([&] {
    const auto node = lsciml::load_report(node_report_dir);
    const auto ude = lsciml::load_report(ude_report_dir);
    lsciml::write_comparison(lsciml::compare_models(node, ude), out_dir);
    return LSCIML_OK;
  });
}

lsciml_status lsciml_cmd_compare_config(const lsciml_config* config, const char* out_dir) {
  if (!config || !out_dir) return null_arg("config/out_dir");
  const auto& c = config->cfg;
  if (c.node_report.empty())
    return fail(LSCIML_ERR_CONFIG, "config key 'node_report': required by compare", "node_report");
  if (c.ude_report.empty())
    return fail(LSCIML_ERR_CONFIG, "config key 'ude_report': required by compare", "ude_report");
  return lsciml_cmd_compare(c.node_report.c_str(), c.ude_report.c_str(), out_dir);
}

lsciml_status lsciml_report_load(const char* report_dir, lsciml_report** out) {
  if (!report_dir || !out) return null_arg("report_dir/out");
  *out = nullptr;
  return guarded([&] {
    *out = new lsciml_report{lsciml::load_report(report_dir)};
    return LSCIML_OK;
  });
}

int lsciml_report_ok(const lsciml_report* report) { return report && report->report.ok ? 1 : 0; }

double lsciml_report_final_loss(const lsciml_report* report) {
  return report ? report->report.final_loss : 0.0;
}

int lsciml_report_breakdown_time(const lsciml_report* report, double* time) {
  if (!report || !report->report.breakdown.breakdown_time) return 0;
  if (time) *time = *report->report.breakdown.breakdown_time;
  return 1;
}

size_t lsciml_report_history_size(const lsciml_report* report) {
  return report ? report->report.loss_history.size() : 0;
}

size_t lsciml_report_history(const lsciml_report* report, double* out, size_t size) {
  if (!report || !out) return 0;
  const auto& h = report->report.loss_history;
  const std::size_t n = std::min(size, h.size());
  std::memcpy(out, h.data(), n * sizeof(double));
  return n;
}

void lsciml_report_free(lsciml_report* report) { delete report; }

}  // extern "C"
