// lsciml command line: simulate, train-node, train-ude, sweep, compare.

#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lsciml/lsciml.h"

namespace {

struct Manifest {
  std::string config;
  std::string out;
  long long seed = -1;
  int workers = 0;
  bool overwrite = false;
  int progress_every = 1000;
};

int report_failure(lsciml_status s) {
  const char* key = lsciml_last_error_key();
  if (s == LSCIML_ERR_CONFIG && key[0] != '\0')
    std::fprintf(stderr, "config error [%s]: %s\n", key, lsciml_last_error());
  else
    std::fprintf(stderr, "error: %s\n", lsciml_last_error());
  return static_cast<int>(s);
}

class ConfigHandle {
 public:
  ~ConfigHandle() { lsciml_config_free(cfg_); }
  lsciml_config* get() const { return cfg_; }
  lsciml_config** out() { return &cfg_; }

 private:
  lsciml_config* cfg_ = nullptr;
};

lsciml_status open_config(const Manifest& m, lsciml_kind kind, ConfigHandle& cfg) {
  lsciml_status s = lsciml_config_load(m.config.c_str(), kind, cfg.out());
  if (s != LSCIML_OK) return s;
  if (m.seed >= 0) s = lsciml_config_set(cfg.get(), "seed", std::to_string(m.seed).c_str());
  return s;
}

void print_progress(int iteration, double loss, void* user) {
  const int every = *static_cast<const int*>(user);
  if (every > 0 && (iteration == 1 || iteration % every == 0))
    std::fprintf(stderr, "iter %d  loss %.8g\n", iteration, loss);
}

int run_simulate(const Manifest& m) {
  ConfigHandle cfg;
  lsciml_status s = open_config(m, LSCIML_KIND_ANY, cfg);
  if (s == LSCIML_OK) s = lsciml_prepare_output_dir(m.out.c_str(), m.overwrite);
  if (s == LSCIML_OK) s = lsciml_cmd_simulate(cfg.get(), m.out.c_str());
  if (s != LSCIML_OK) return report_failure(s);
  std::printf("wrote %s/trajectory.csv\n", m.out.c_str());
  return 0;
}

int run_train(const Manifest& m, lsciml_kind kind) {
  ConfigHandle cfg;
  lsciml_status s = open_config(m, kind, cfg);
  if (s == LSCIML_OK) s = lsciml_prepare_output_dir(m.out.c_str(), m.overwrite);
  if (s != LSCIML_OK) return report_failure(s);

  int every = m.progress_every;
  lsciml_report* report = nullptr;
  s = lsciml_cmd_train(cfg.get(), kind, m.out.c_str(), print_progress, &every, &report);
  if (report) {
    double t = 0.0;
    std::printf("final_loss %.10g\n", lsciml_report_final_loss(report));
    if (lsciml_report_breakdown_time(report, &t))
      std::printf("breakdown_time %g\n", t);
    else
      std::printf("breakdown_time beyond_horizon\n");
    lsciml_report_free(report);
  }
  if (s != LSCIML_OK) return report_failure(s);
  return 0;
}

int run_sweep(const Manifest& m) {
  ConfigHandle cfg;
  lsciml_status s = open_config(m, LSCIML_KIND_ANY, cfg);
  if (s == LSCIML_OK) s = lsciml_prepare_output_dir(m.out.c_str(), m.overwrite);
  if (s != LSCIML_OK) return report_failure(s);
  int workers = m.workers;
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  s = lsciml_cmd_sweep(cfg.get(), m.out.c_str(), workers);
  if (s != LSCIML_OK) return report_failure(s);
  std::printf("wrote %s/summary.csv\n", m.out.c_str());
  return 0;
}

int run_compare(const Manifest& m) {
  ConfigHandle cfg;
  lsciml_status s = open_config(m, LSCIML_KIND_ANY, cfg);
  if (s == LSCIML_OK) s = lsciml_prepare_output_dir(m.out.c_str(), m.overwrite);
  if (s == LSCIML_OK) s = lsciml_cmd_compare_config(cfg.get(), m.out.c_str());
  if (s != LSCIML_OK) return report_failure(s);
  std::printf("wrote %s/comparison.csv\n", m.out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lorenz system Neural ODE / UDE toolkit"};
  app.set_version_flag("--version", std::string(lsciml_version()));
  app.require_subcommand(1);

  Manifest m;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", m.config, "experiment config file")->required();
    sub->add_option("--out", m.out, "output directory")->required();
    sub->add_option("--seed", m.seed, "override the config seed")->check(CLI::NonNegativeNumber);
    sub->add_flag("--overwrite", m.overwrite, "allow a non-empty output directory");
  };

  auto* simulate = app.add_subcommand("simulate", "write the ground-truth trajectory");
  add_common(simulate);
  auto* train_node = app.add_subcommand("train-node", "train and forecast a neural ODE");
  add_common(train_node);
  auto* train_ude = app.add_subcommand("train-ude", "train and forecast a UDE");
  add_common(train_ude);
  for (auto* sub : {train_node, train_ude})
    sub->add_option("--progress-every", m.progress_every, "log every N iterations (0 = quiet)");
  auto* sweep = app.add_subcommand("sweep", "run a hyperparameter grid");
  add_common(sweep);
  sweep->add_option("--workers", m.workers, "parallel arms (default: hardware threads)")
      ->check(CLI::NonNegativeNumber);
  auto* compare = app.add_subcommand("compare", "compare a NODE and a UDE report");
  add_common(compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : LSCIML_ERR_CONFIG;
  }

  if (*simulate) return run_simulate(m);
  if (*train_node) return run_train(m, LSCIML_KIND_NODE);
  if (*train_ude) return run_train(m, LSCIML_KIND_UDE);
  if (*sweep) return run_sweep(m);
  return run_compare(m);
}
