#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kTmp = fs::temp_directory_path() / "lsciml_cli";

int run(const std::string& args) {
  const std::string cmd = std::string(LSCIML_CLI) + " " + args + " >" + (kTmp / "out.txt").string() +
                          " 2>" + (kTmp / "err.txt").string();
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kTmp);
  const auto p = kTmp / name;
  std::ofstream(p) << text;
  return p;
}

std::size_t rows(const fs::path& csv) {
  std::ifstream is(csv);
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) ++n;
  return n;
}

}  // namespace

TEST_CASE("simulate writes the default trajectory") {
  fs::remove_all(kTmp / "sim");
  const auto cfg = write_config("sim.cfg", "kind = node\n");
  REQUIRE(run("simulate --config " + cfg.string() + " --out " + (kTmp / "sim").string()) == 0);
  CHECK(rows(kTmp / "sim" / "trajectory.csv") == 102);
}

TEST_CASE("simulate an empty span") {
  fs::remove_all(kTmp / "sim0");
  const auto cfg = write_config("sim0.cfg", "train_t1 = 0\n");
  REQUIRE(run("simulate --config " + cfg.string() + " --out " + (kTmp / "sim0").string()) == 0);
  CHECK(rows(kTmp / "sim0" / "trajectory.csv") == 2);
}

TEST_CASE("malformed config exits 2 naming the key") {
  const auto cfg = write_config("bad.cfg", "kind = node\nlearnin_rate = 0.1\n");
  CHECK(run("simulate --config " + cfg.string() + " --out " + (kTmp / "bad").string()) == 2);
  CHECK(slurp(kTmp / "err.txt").find("learnin_rate") != std::string::npos);
  CHECK(run("train-node --config " + (kTmp / "missing.cfg").string() + " --out " + (kTmp / "x").string()) == 2);
  CHECK(run("train-node --config") == 2);
  CHECK(run("frobnicate") == 2);
}

TEST_CASE("simulation blowup exits 3") {
  fs::remove_all(kTmp / "blow");
  const auto cfg = write_config("blow.cfg", "rho = 1e200\nu0 = 1e200,1e200,1e200\n");
  CHECK(run("simulate --config " + cfg.string() + " --out " + (kTmp / "blow").string()) == 3);
}

TEST_CASE("train-node smoke run writes a full report") {
  fs::remove_all(kTmp / "node");
  const auto cfg = write_config("node.cfg", "kind = node\niterations = 10\n");
  REQUIRE(run("train-node --config " + cfg.string() + " --out " + (kTmp / "node").string() + " --seed 7") == 0);
  for (const char* f : {"report.json", "config.txt", "loss.csv", "trajectory_truth.csv", "trajectory_train.csv",
                        "trajectory_pred.csv", "trajectory_forecast.csv", "breakdown.csv", "theta.json"})
    CHECK(fs::exists(kTmp / "node" / f));
  CHECK(slurp(kTmp / "node" / "config.txt").find("seed = 7") != std::string::npos);
  CHECK(rows(kTmp / "node" / "loss.csv") == 11);
  // Existing non-empty output directory.
  CHECK(run("train-node --config " + cfg.string() + " --out " + (kTmp / "node").string()) == 2);
  CHECK(run("train-node --config " + cfg.string() + " --out " + (kTmp / "node").string() + " --overwrite") == 0);
}

TEST_CASE("training divergence exits 4 with a partial report") {
  fs::remove_all(kTmp / "div");
  const auto cfg = write_config("div.cfg", "hidden = none\nlearning_rate = 1e6\nmax_blowup_streak = 1\niterations = 20\n");
  CHECK(run("train-node --config " + cfg.string() + " --out " + (kTmp / "div").string()) == 4);
  CHECK(fs::exists(kTmp / "div" / "report.json"));
  CHECK(fs::exists(kTmp / "div" / "loss.csv"));
}

TEST_CASE("train-ude, compare and sweep") {
  for (const char* d : {"ude", "node2", "cmp", "sweep", "sweep_empty"}) fs::remove_all(kTmp / d);
  const auto ude = write_config("ude.cfg", "kind = ude\niterations = 3\nhidden = 5\n");
  REQUIRE(run("train-ude --config " + ude.string() + " --out " + (kTmp / "ude").string()) == 0);
  CHECK(fs::exists(kTmp / "ude" / "residuals.csv"));
  CHECK(run("train-node --config " + ude.string() + " --out " + (kTmp / "node_from_ude").string()) == 2);

  const auto node = write_config("node2.cfg", "iterations = 3\n");
  REQUIRE(run("train-node --config " + node.string() + " --out " + (kTmp / "node2").string()) == 0);
  const auto cmp = write_config("cmp.cfg", "node_report = " + (kTmp / "node2").string() +
                                                "\nude_report = " + (kTmp / "ude").string() + "\n");
  REQUIRE(run("compare --config " + cmp.string() + " --out " + (kTmp / "cmp").string()) == 0);
  CHECK(rows(kTmp / "cmp" / "comparison.csv") == 3);

  const auto sweep = write_config("sweep.cfg", "iterations = 2\nsweep.seed = 1\n");
  REQUIRE(run("sweep --config " + sweep.string() + " --out " + (kTmp / "sweep").string() + " --workers 1") == 0);
  CHECK(rows(kTmp / "sweep" / "summary.csv") == 2);
  CHECK(fs::exists(kTmp / "sweep" / "arm00_seed-1" / "report.json"));
  const auto empty = write_config("empty.cfg", "iterations = 2\n");
  CHECK(run("sweep --config " + empty.string() + " --out " + (kTmp / "sweep_empty").string()) == 2);
}
