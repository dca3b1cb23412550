#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lsciml {

enum class Activation { sigmoid, tanh, relu };

std::string_view to_string(Activation a);
/// Throws ContractError for unknown names.
Activation parse_activation(std::string_view name);

/// Fully connected network; hidden layers use `activation`, the output
/// layer is affine.
struct MlpSpec {
  std::size_t input_dim = 3;
  std::vector<std::size_t> hidden_layers{25, 25};
  std::size_t output_dim = 3;
  Activation activation = Activation::sigmoid;

  void validate() const;
  /// Sum over layers of (fan_in + 1) * fan_out.
  std::size_t param_count() const;
  /// input_dim, hidden widths..., output_dim
  std::vector<std::size_t> layer_widths() const;

  bool operator==(const MlpSpec&) const = default;
};

/// Per layer: row-major weights [fan_out][fan_in], then fan_out biases.
using FlatParams = std::vector<double>;

/// Glorot-uniform weights, zero biases, deterministic in `seed`.
FlatParams init_params(const MlpSpec& spec, std::uint64_t seed);

/// Allocating convenience wrapper around MlpEvaluator.
std::vector<double> forward(const MlpSpec& spec, std::span<const double> theta,
                            std::span<const double> input);

/// Forward and reverse passes with preallocated scratch. One per thread.
class MlpEvaluator {
 public:
  explicit MlpEvaluator(MlpSpec spec);

  const MlpSpec& spec() const { return spec_; }
  std::size_t param_count() const { return param_count_; }
  /// Doubles needed to record one forward pass for a later backward().
  std::size_t tape_width() const { return tape_width_; }

  /// Writes output_dim values to `out`. When `tape` is non-empty it must
  /// hold tape_width() doubles and receives the layer activations.
  void forward(std::span<const double> theta, std::span<const double> input,
               std::span<double> out, std::span<double> tape = {});

  /// Given d(loss)/d(out), accumulates d(loss)/d(theta) into `grad_theta`
  /// and writes d(loss)/d(input) into `grad_input` (may be empty).
  void backward(std::span<const double> theta, std::span<const double> tape,
                std::span<const double> grad_out, std::span<double> grad_input,
                std::span<double> grad_theta);

 private:
  MlpSpec spec_;
  std::vector<std::size_t> widths_;
  std::vector<std::size_t> offsets_;  // parameter offset of each layer
  std::size_t param_count_ = 0;
  std::size_t tape_width_ = 0;
  std::vector<double> buf_a_, buf_b_, local_tape_;
};

}  // namespace lsciml
