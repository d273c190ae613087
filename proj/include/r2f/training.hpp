#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "r2f/metrics.hpp"
#include "r2f/model.hpp"

namespace r2f {

enum class SelectionMetric { kMacroF1, kMicroF1 };

std::string to_string(SelectionMetric metric);
SelectionMetric parse_selection_metric(std::string_view name);

struct TrainConfig {
  std::size_t epochs = 5;
  std::size_t batch_size = 8;
  std::size_t accumulation_steps = 4;
  double learning_rate = 1e-3;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  // Optimizer steps between dev evaluations; 0 = once per epoch.
  std::size_t eval_interval = 0;
  std::uint64_t seed = 42;
  double threshold = 0.5;
  SelectionMetric selection = SelectionMetric::kMacroF1;

  void validate() const;
  // Stable one-line summary of every field, stored in checkpoints.
  std::string digest() const;
};

struct AdamState {
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::uint64_t step = 0;
};

// One AdamW update; decoupled weight decay is applied to weight matrices
// only, before the moment update (p -= lr * wd * p).
void adamw_step(std::vector<TensorRef> params, std::vector<TensorRef> grads, AdamState& state,
                const TrainConfig& config);

struct EvalLine {
  std::size_t step = 0;
  std::size_t epoch = 0;
  double loss = 0.0;
  double dev_micro_f1 = 0.0;
  double dev_macro_f1 = 0.0;
  bool selected = false;

  // step=.. epoch=.. loss=.. dev_micro_f1=.. dev_macro_f1=.. selected=0|1
  std::string to_text() const;
};

struct TrainResult {
  Model model;
  DocEvalReport best_dev;
  std::size_t best_step = 0;
  std::size_t total_steps = 0;
  std::vector<EvalLine> log;
};

using TrainLogger = std::function<void(const EvalLine&)>;

// Throws kEmptyDataset for an empty or unlabeled split and kNonFiniteLoss
// when a loss or gradient stops being finite.
TrainResult train(const std::vector<PreparedSample>& train_set,
                  const std::vector<PreparedSample>& dev_set, const ModelConfig& model_config,
                  const TrainConfig& config, const TrainLogger& logger = {});

struct SamplePrediction {
  bool label = false;
  double score = 0.0;
  std::optional<std::size_t> argmin_index;
  std::vector<double> sentence_scores;
  std::vector<bool> sentence_labels;
};

// Entailment iff score >= threshold, per document and per sentence.
SamplePrediction predict(const Model& model, const PreparedSample& sample, double threshold);

DocEvalReport evaluate(const Model& model, const std::vector<PreparedSample>& samples,
                       double threshold);

struct GradCheckConfig {
  std::size_t samples = 100;
  std::size_t min_sentences = 2;
  std::size_t max_sentences = 10;
  double step = 1e-5;
  // Relative error is |a - n| / max(|a|, |n|, floor).
  double floor = 1e-6;
  // Coordinates checked per tensor per sample: the largest analytic
  // entries plus random ones.
  std::size_t largest_per_tensor = 4;
  std::size_t random_per_tensor = 4;
  double substring_rate = 0.1;
  std::uint64_t seed = 42;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_tensor;
  std::size_t coordinates = 0;
};

// Random model and random feature vectors; compares backward() against
// central finite differences of the BCE loss.
GradCheckResult gradient_check(const ModelConfig& model_config, const GradCheckConfig& config);

}  // namespace r2f
