#include "net.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "errors.hpp"

namespace lsciml {

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::relu: return "relu";
  }
  return "?";
}

Activation parse_activation(std::string_view name) {
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "tanh") return Activation::tanh;
  if (name == "relu") return Activation::relu;
  throw ContractError("unknown activation '" + std::string(name) + "'");
}

void MlpSpec::validate() const {
  if (input_dim == 0 || output_dim == 0) throw ContractError("MLP dimensions must be positive");
  for (auto w : hidden_layers)
    if (w == 0) throw ContractError("MLP hidden widths must be positive");
}

std::vector<std::size_t> MlpSpec::layer_widths() const {
  std::vector<std::size_t> w;
  w.reserve(hidden_layers.size() + 2);
  w.push_back(input_dim);
  w.insert(w.end(), hidden_layers.begin(), hidden_layers.end());
  w.push_back(output_dim);
  return w;
}

std::size_t MlpSpec::param_count() const {
  const auto w = layer_widths();
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < w.size(); ++l) n += (w[l] + 1) * w[l + 1];
  return n;
}

FlatParams init_params(const MlpSpec& spec, std::uint64_t seed) {
  spec.validate();
  const auto w = spec.layer_widths();
  FlatParams theta;
  theta.reserve(spec.param_count());
  std::mt19937_64 rng(seed);
  for (std::size_t l = 0; l + 1 < w.size(); ++l) {
    const double bound = std::sqrt(6.0 / static_cast<double>(w[l] + w[l + 1]));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (std::size_t i = 0; i < w[l] * w[l + 1]; ++i) theta.push_back(dist(rng));
    theta.insert(theta.end(), w[l + 1], 0.0);
  }
  return theta;
}

std::vector<double> forward(const MlpSpec& spec, std::span<const double> theta,
                            std::span<const double> input) {
  MlpEvaluator eval(spec);
  std::vector<double> out(spec.output_dim);
  eval.forward(theta, input, out);
  return out;
}

namespace {

inline double activate(Activation a, double v) {
  switch (a) {
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-v));
    case Activation::tanh: return std::tanh(v);
    case Activation::relu: return v > 0.0 ? v : 0.0;
  }
  return v;
}

// Derivative expressed through the activation's output value.
inline double activate_grad(Activation a, double out) {
  switch (a) {
    case Activation::sigmoid: return out * (1.0 - out);
    case Activation::tanh: return 1.0 - out * out;
    case Activation::relu: return out > 0.0 ? 1.0 : 0.0;
  }
  return 1.0;
}

}  // namespace

MlpEvaluator::MlpEvaluator(MlpSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  widths_ = spec_.layer_widths();
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    offsets_.push_back(off);
    off += (widths_[l] + 1) * widths_[l + 1];
  }
  param_count_ = off;
  tape_width_ = spec_.input_dim;
  for (auto h : spec_.hidden_layers) tape_width_ += h;
  const auto widest = *std::max_element(widths_.begin(), widths_.end());
  buf_a_.resize(widest);
  buf_b_.resize(widest);
  local_tape_.resize(tape_width_);
}

void MlpEvaluator::forward(std::span<const double> theta, std::span<const double> input,
                           std::span<double> out, std::span<double> tape) {
  if (theta.size() != param_count_)
    throw ContractError("parameter vector has length " + std::to_string(theta.size()) +
                        ", network needs " + std::to_string(param_count_));
  if (input.size() != spec_.input_dim)
    throw ContractError("network input has length " + std::to_string(input.size()) +
                        ", expected " + std::to_string(spec_.input_dim));
  if (out.size() != spec_.output_dim) throw ContractError("network output span has wrong length");
  if (tape.empty()) tape = local_tape_;
  if (tape.size() != tape_width_) throw ContractError("network tape span has wrong length");

  std::copy(input.begin(), input.end(), tape.begin());
  std::size_t in_off = 0;
  const std::size_t layers = widths_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t fan_in = widths_[l];
    const std::size_t fan_out = widths_[l + 1];
    const double* w = theta.data() + offsets_[l];
    const double* b = w + fan_in * fan_out;
    const double* a_in = tape.data() + in_off;
    const bool last = l + 1 == layers;
    double* a_out = last ? out.data() : tape.data() + in_off + fan_in;
    for (std::size_t o = 0; o < fan_out; ++o) {
      const double* row = w + o * fan_in;
      double acc = b[o];
      for (std::size_t i = 0; i < fan_in; ++i) acc += row[i] * a_in[i];
      a_out[o] = last ? acc : activate(spec_.activation, acc);
    }
    in_off += fan_in;
  }
}

void MlpEvaluator::backward(std::span<const double> theta, std::span<const double> tape,
                            std::span<const double> grad_out, std::span<double> grad_input,
                            std::span<double> grad_theta) {
  if (theta.size() != param_count_ || grad_theta.size() != param_count_)
    throw ContractError("parameter/gradient length does not match network");
  if (tape.size() != tape_width_ || grad_out.size() != spec_.output_dim)
    throw ContractError("tape or output gradient has wrong length");
  if (!grad_input.empty() && grad_input.size() != spec_.input_dim)
    throw ContractError("input gradient span has wrong length");

  const std::size_t layers = widths_.size() - 1;
  double* delta = buf_a_.data();
  double* g = buf_b_.data();
  std::copy(grad_out.begin(), grad_out.end(), delta);

  // Offset of each layer's input inside the tape.
  std::size_t in_off = tape_width_ - widths_[layers - 1];
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t fan_in = widths_[l];
    const std::size_t fan_out = widths_[l + 1];
    const double* w = theta.data() + offsets_[l];
    double* gw = grad_theta.data() + offsets_[l];
    double* gb = gw + fan_in * fan_out;
    const double* a_in = tape.data() + in_off;

    std::fill(g, g + fan_in, 0.0);
    for (std::size_t o = 0; o < fan_out; ++o) {
      const double d = delta[o];
      gb[o] += d;
      const double* row = w + o * fan_in;
      double* grow = gw + o * fan_in;
      for (std::size_t i = 0; i < fan_in; ++i) {
        grow[i] += d * a_in[i];
        g[i] += row[i] * d;
      }
    }
    if (l == 0) {
      if (!grad_input.empty()) std::copy(g, g + fan_in, grad_input.begin());
      break;
    }
    for (std::size_t i = 0; i < fan_in; ++i)
      g[i] *= activate_grad(spec_.activation, a_in[i]);
    std::swap(delta, g);
    in_off -= widths_[l - 1];
  }
}

}  // namespace lsciml
