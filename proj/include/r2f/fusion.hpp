#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "r2f/mlp.hpp"

namespace r2f {

class Rng;

enum class FusionMethod { kScoreMin, kVectorMin, kKernel };

std::string to_string(FusionMethod method);
FusionMethod parse_fusion_method(std::string_view name);

// Gaussian kernels over the credibility range [0, 1].
struct KernelBank {
  std::vector<double> means;
  std::vector<double> widths;

  // Evenly spaced means 0, 1/(C-1), ..., 1 (a single kernel sits at 0.5).
  static KernelBank linspace(std::size_t count = 11, double width = 0.01);
  // Means drawn uniformly from [0, 1].
  static KernelBank uniform(std::size_t count, double width, Rng& rng);

  std::size_t size() const { return means.size(); }
  // Throws kValidation on an empty bank, non-positive width or mean outside [0,1].
  void validate() const;
};

struct FusionResult {
  double sample_score = 0.0;
  FusionMethod method = FusionMethod::kScoreMin;
  std::optional<std::size_t> argmin_index;  // score_min only
  std::vector<double> per_sentence_scores;
  // h_HP for vector_min, V_HP for kernel; empty for score_min.
  std::vector<double> pooled;
  // vector_min: which sentence supplied each pooled dimension.
  std::vector<std::size_t> pooled_argmin;
};

// Minimum, with ties resolved to the lowest index. Throws kEmptyHypothesis.
FusionResult fuse_score_min(std::span<const double> scores);

// Componentwise minimum of the inference vectors, then sigmoid(MLP(h_HP)).
// `sentence_scores`, when given, is reported as per_sentence_scores;
// otherwise they are sigmoid(MLP(h_i)).
FusionResult fuse_vector_min(std::span<const std::vector<double>> vectors, const Mlp& head,
                             std::span<const double> sentence_scores = {});

std::vector<double> kernel_vector(double score, const KernelBank& bank);

// Mean of the per-sentence kernel vectors, then sigmoid(MLP(V_HP)).
FusionResult fuse_kernel(std::span<const double> scores, const KernelBank& bank, const Mlp& head);

}  // namespace r2f
