#include "r2f/mlp.hpp"

#include <cmath>

#include "r2f/error.hpp"
#include "r2f/random.hpp"

namespace r2f {

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Mlp::Mlp(const std::vector<std::size_t>& widths, Activation output_activation)
    : output_activation_(output_activation) {
  if (widths.size() < 2) throw Error(ErrorCode::kShapeMismatch, "MLP needs at least two widths");
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    if (widths[l] == 0 || widths[l + 1] == 0) {
      throw Error(ErrorCode::kShapeMismatch, "MLP widths must be positive");
    }
    DenseLayer layer;
    layer.in = widths[l];
    layer.out = widths[l + 1];
    layer.weight.assign(layer.in * layer.out, 0.0);
    layer.bias.assign(layer.out, 0.0);
    layers_.push_back(std::move(layer));
  }
}

void Mlp::init_uniform(Rng& rng, double scale, bool include_bias) {
  for (auto& layer : layers_) {
    for (auto& w : layer.weight) w = rng.uniform(-scale, scale);
    if (include_bias) {
      for (auto& b : layer.bias) b = rng.uniform(-scale, scale);
    }
  }
}

void Mlp::zero() {
  for (auto& layer : layers_) {
    std::fill(layer.weight.begin(), layer.weight.end(), 0.0);
    std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
  }
}

std::vector<double> Mlp::forward(std::span<const double> input, Trace* trace) const {
  if (input.size() != input_dim()) {
    throw Error(ErrorCode::kShapeMismatch, "MLP input has " + std::to_string(input.size()) +
                                               " components, expected " +
                                               std::to_string(input_dim()));
  }
  std::vector<double> current(input.begin(), input.end());
  if (trace != nullptr) {
    trace->activations.clear();
    trace->activations.push_back(current);
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const DenseLayer& layer = layers_[l];
    const bool last = l + 1 == layers_.size();
    const bool squash = !last || output_activation_ == Activation::kTanh;
    std::vector<double> next(layer.out);
    for (std::size_t o = 0; o < layer.out; ++o) {
      double sum = layer.bias[o];
      const double* row = layer.weight.data() + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) sum += row[i] * current[i];
      next[o] = squash ? std::tanh(sum) : sum;
    }
    current = std::move(next);
    if (trace != nullptr) trace->activations.push_back(current);
  }
  return current;
}

std::vector<double> Mlp::backward(const Trace& trace, std::span<const double> grad_output,
                                  Mlp& grads) const {
  if (trace.activations.size() != layers_.size() + 1 || grad_output.size() != output_dim() ||
      !same_shape(grads)) {
    throw Error(ErrorCode::kShapeMismatch, "MLP backward: inconsistent trace or gradient shapes");
  }
  std::vector<double> grad(grad_output.begin(), grad_output.end());
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const DenseLayer& layer = layers_[l];
    DenseLayer& g = grads.layers_[l];
    const bool last = l + 1 == layers_.size();
    const bool squash = !last || output_activation_ == Activation::kTanh;
    const std::vector<double>& out = trace.activations[l + 1];
    const std::vector<double>& in = trace.activations[l];
    if (squash) {
      for (std::size_t o = 0; o < layer.out; ++o) grad[o] *= 1.0 - out[o] * out[o];
    }
    std::vector<double> grad_in(layer.in, 0.0);
    for (std::size_t o = 0; o < layer.out; ++o) {
      const double go = grad[o];
      if (go == 0.0) continue;
      g.bias[o] += go;
      const double* row = layer.weight.data() + o * layer.in;
      double* grow = g.weight.data() + o * layer.in;
      for (std::size_t i = 0; i < layer.in; ++i) {
        grow[i] += go * in[i];
        grad_in[i] += go * row[i];
      }
    }
    grad = std::move(grad_in);
  }
  return grad;
}

std::vector<std::size_t> Mlp::widths() const {
  std::vector<std::size_t> out;
  if (layers_.empty()) return out;
  out.push_back(layers_.front().in);
  for (const auto& layer : layers_) out.push_back(layer.out);
  return out;
}

void Mlp::append_tensors(const std::string& prefix, std::vector<TensorRef>& out) {
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const std::string base = prefix + "." + std::to_string(l);
    out.push_back({base + ".weight", &layers_[l].weight, true});
    out.push_back({base + ".bias", &layers_[l].bias, false});
  }
}

bool Mlp::same_shape(const Mlp& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].in != other.layers_[l].in || layers_[l].out != other.layers_[l].out) return false;
  }
  return true;
}

}  // namespace r2f
