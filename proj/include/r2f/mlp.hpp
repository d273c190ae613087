#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace r2f {

class Rng;

enum class Activation { kTanh, kIdentity };

// Fully connected layer, row-major weight of shape [out x in].
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weight;
  std::vector<double> bias;
};

// Non-owning view of one parameter tensor, used by the optimizer,
// checkpointing and gradient checks. Weight matrices take weight decay,
// bias vectors do not.
struct TensorRef {
  std::string name;
  std::vector<double>* values;
  bool is_weight;
};

// Multi-layer perceptron with tanh on hidden layers and a configurable
// output activation.
class Mlp {
 public:
  // Activations of every layer for one forward pass; entry 0 is the input.
  struct Trace {
    std::vector<std::vector<double>> activations;
  };

  Mlp() = default;
  // widths = {input, hidden..., output}; all parameters start at zero.
  Mlp(const std::vector<std::size_t>& widths, Activation output_activation);

  void init_uniform(Rng& rng, double scale, bool include_bias);
  void zero();

  std::vector<double> forward(std::span<const double> input, Trace* trace = nullptr) const;

  // Accumulates parameter gradients into `grads` (same shape as *this) and
  // returns the gradient with respect to the input.
  std::vector<double> backward(const Trace& trace, std::span<const double> grad_output,
                               Mlp& grads) const;

  std::size_t input_dim() const { return layers_.empty() ? 0 : layers_.front().in; }
  std::size_t output_dim() const { return layers_.empty() ? 0 : layers_.back().out; }
  bool empty() const { return layers_.empty(); }
  std::vector<std::size_t> widths() const;
  Activation output_activation() const { return output_activation_; }

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  void append_tensors(const std::string& prefix, std::vector<TensorRef>& out);

  bool same_shape(const Mlp& other) const;

 private:
  std::vector<DenseLayer> layers_;
  Activation output_activation_ = Activation::kIdentity;
};

double sigmoid(double x);

}  // namespace r2f
