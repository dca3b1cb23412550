#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "net.hpp"
#include "train.hpp"
#include "ude.hpp"

namespace lsciml {

enum class ModelKind { node, ude };
std::string_view to_string(ModelKind k);
ModelKind parse_model_kind(std::string_view s);

/// Everything needed to rerun one experiment. Serialized as the
/// `key = value` file format read by load_config().
struct ExperimentConfig {
  ModelKind kind = ModelKind::node;
  LorenzParams lorenz{};
  State3 u0 = kDefaultU0;
  double train_t0 = 0.0;
  double train_t1 = 10.0;
  double forecast_t1 = 15.0;
  double save_dt = 0.1;
  double step = 0.01;

  std::vector<std::size_t> hidden_layers{25, 25};
  Activation activation = Activation::sigmoid;

  TrainConfig train{};

  double noise_level = 0.0;
  std::optional<std::uint64_t> noise_seed;  ///< defaults to train.seed
  double breakdown_threshold = 0.2;

  InputMode input_mode = InputMode::time_and_state;
  Eq7Form eq7_form = Eq7Form::verbatim;
  NetLayout layout = NetLayout::shared;

  /// Sweep axes: key -> list of values, each value a valid setting for key.
  std::map<std::string, std::vector<std::string>> sweep;

  /// `compare` inputs.
  std::string node_report;
  std::string ude_report;

  /// Applies one `key = value` setting; throws ConfigError naming the key.
  void set(const std::string& key, const std::string& value);
  /// Cross-field checks; throws ConfigError naming the first bad key.
  void validate() const;
  /// Ordered key/value pairs that reproduce this config (sweep axes excluded).
  std::vector<std::pair<std::string, std::string>> entries() const;
  std::string to_text() const;

  MlpSpec node_spec() const;
  MlpSpec ude_spec() const;
  std::uint64_t effective_noise_seed() const { return noise_seed.value_or(train.seed); }
};

/// Model defaults for a given kind (UDE trains on (0, 8) with Adam->BFGS).
ExperimentConfig default_config(ModelKind kind);

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Expands the sweep axes into one config per grid point (cartesian
/// product, axes in key order). Throws ConfigError("sweep", ...) when there
/// are no axes or an axis has no values.
std::vector<std::pair<std::string, ExperimentConfig>> expand_sweep(const ExperimentConfig& base);

}  // namespace lsciml
