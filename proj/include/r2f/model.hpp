#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "r2f/fusion.hpp"
#include "r2f/mlp.hpp"
#include "r2f/reader.hpp"

namespace r2f {

class Rng;

struct ModelConfig {
  ReaderConfig reader;
  FusionMethod fusion = FusionMethod::kScoreMin;
  // Kernel bank; ignored by the other heads.
  std::size_t kernel_count = 11;
  double kernel_width = 0.01;
  bool random_kernel_means = false;
  // Hidden widths of the kernel head C -> ... -> 1.
  std::vector<std::size_t> kernel_head_hidden{64};
  // Retrieval K the features were normalized with.
  std::size_t evidence_slots = 5;
  double init_scale = 0.1;

  void validate() const;
};

// Reader plus fusion head. Score-min has no extra parameters; vector-min
// reuses the reader's credibility head on h_HP; kernel fusion owns a
// separate head over the pooled kernel vector.
struct Model {
  ReaderParams reader;
  FusionMethod fusion = FusionMethod::kScoreMin;
  KernelBank bank;
  Mlp kernel_head;
  FeatureConfig features;

  // Weights uniform in [-init_scale, init_scale], biases zero.
  static Model create(const ModelConfig& config, Rng& rng);

  // Same shapes, all parameters zero.
  Model zeros_like() const;
  std::vector<TensorRef> tensors();
  std::size_t parameter_count() const;
  void validate() const;
};

// Gradient buffers mirroring a model's parameters.
struct GradientTape {
  Model grads;

  explicit GradientTape(const Model& model) : grads(model.zeros_like()) {}
  void zero();
  void scale(double factor);
  std::vector<TensorRef> tensors() { return grads.tensors(); }
};

// One hypothesis sentence after retrieval and feature extraction.
struct PreparedSentence {
  bool is_substring = false;
  std::vector<double> features;  // empty for substring sentences
};

struct PreparedSample {
  std::string id;
  std::vector<PreparedSentence> sentences;
  std::optional<bool> label;  // true = entailment
};

// Everything recorded by a forward pass that backward needs.
struct ForwardPass {
  FusionResult fusion;
  std::vector<double> sentence_scores;
  std::vector<std::vector<double>> vectors;
  std::vector<Mlp::Trace> encoder_traces;
  std::vector<Mlp::Trace> head_traces;
  Mlp::Trace fusion_trace;  // head over h_HP or V_HP
  std::vector<std::vector<double>> kernel_vectors;
};

ForwardPass forward(const Model& model, const PreparedSample& sample);

// Accumulates d(loss)/d(params) into `tape`, given d(loss)/d(sample score).
void backward(const Model& model, const ForwardPass& pass, double grad_score, GradientTape& tape);

// -[y log p + (1-y) log(1-p)] with p clamped to [1e-7, 1 - 1e-7].
double bce_loss(double score, bool label);
// Derivative with respect to the unclamped score (zero where clamped).
double bce_grad(double score, bool label);

inline constexpr double kLossClamp = 1e-7;

}  // namespace r2f
