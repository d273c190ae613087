#include "r2f/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "r2f/error.hpp"
#include "r2f/random.hpp"

namespace r2f {

std::string to_string(FusionMethod method) {
  switch (method) {
    case FusionMethod::kScoreMin: return "score_min";
    case FusionMethod::kVectorMin: return "vector_min";
    case FusionMethod::kKernel: return "kernel";
  }
  return "unknown";
}

FusionMethod parse_fusion_method(std::string_view name) {
  if (name == "score_min") return FusionMethod::kScoreMin;
  if (name == "vector_min") return FusionMethod::kVectorMin;
  if (name == "kernel") return FusionMethod::kKernel;
  throw Error(ErrorCode::kInvalidArgument, "unknown fusion method '" + std::string(name) + "'");
}

KernelBank KernelBank::linspace(std::size_t count, double width) {
  KernelBank bank;
  for (std::size_t j = 0; j < count; ++j) {
    bank.means.push_back(count == 1 ? 0.5 : static_cast<double>(j) / static_cast<double>(count - 1));
    bank.widths.push_back(width);
  }
  return bank;
}

KernelBank KernelBank::uniform(std::size_t count, double width, Rng& rng) {
  KernelBank bank;
  for (std::size_t j = 0; j < count; ++j) {
    // closed interval: 53-bit draw scaled by 1/(2^53 - 1)
    bank.means.push_back(static_cast<double>(rng.next() >> 11) / 9007199254740991.0);
    bank.widths.push_back(width);
  }
  return bank;
}

void KernelBank::validate() const {
  if (means.empty()) throw Error(ErrorCode::kValidation, "kernel bank is empty");
  if (means.size() != widths.size()) {
    throw Error(ErrorCode::kValidation, "kernel means and widths differ in length");
  }
  for (std::size_t j = 0; j < means.size(); ++j) {
    if (!(widths[j] > 0.0)) throw Error(ErrorCode::kValidation, "kernel width must be > 0");
    if (!(means[j] >= 0.0 && means[j] <= 1.0)) {
      throw Error(ErrorCode::kValidation, "kernel mean must lie in [0,1]");
    }
  }
}

FusionResult fuse_score_min(std::span<const double> scores) {
  if (scores.empty()) throw Error(ErrorCode::kEmptyHypothesis, "no hypothesis sentences to fuse");
  FusionResult result;
  result.method = FusionMethod::kScoreMin;
  result.per_sentence_scores.assign(scores.begin(), scores.end());
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] < scores[best]) best = i;
  }
  result.argmin_index = best;
  result.sample_score = scores[best];
  return result;
}

FusionResult fuse_vector_min(std::span<const std::vector<double>> vectors, const Mlp& head,
                             std::span<const double> sentence_scores) {
  if (vectors.empty()) throw Error(ErrorCode::kEmptyHypothesis, "no hypothesis sentences to fuse");
  const std::size_t dim = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != dim) throw Error(ErrorCode::kDimensionMismatch, "inference vectors differ in dimension");
  }
  if (!sentence_scores.empty() && sentence_scores.size() != vectors.size()) {
    throw Error(ErrorCode::kLengthMismatch, "sentence scores do not match vectors");
  }
  FusionResult result;
  result.method = FusionMethod::kVectorMin;
  result.pooled = vectors.front();
  result.pooled_argmin.assign(dim, 0);
  for (std::size_t i = 1; i < vectors.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      if (vectors[i][j] < result.pooled[j]) {
        result.pooled[j] = vectors[i][j];
        result.pooled_argmin[j] = i;
      }
    }
  }
  result.sample_score = sigmoid(head.forward(result.pooled).front());
  if (!sentence_scores.empty()) {
    result.per_sentence_scores.assign(sentence_scores.begin(), sentence_scores.end());
  } else {
    for (const auto& v : vectors) result.per_sentence_scores.push_back(sigmoid(head.forward(v).front()));
  }
  return result;
}

std::vector<double> kernel_vector(double score, const KernelBank& bank) {
  std::vector<double> out(bank.size());
  for (std::size_t j = 0; j < bank.size(); ++j) {
    const double d = score - bank.means[j];
    // far tails underflow; keep them at the smallest positive double
    out[j] = std::max(std::exp(-(d * d) / (2.0 * bank.widths[j] * bank.widths[j])),
                      std::numeric_limits<double>::denorm_min());
  }
  return out;
}

FusionResult fuse_kernel(std::span<const double> scores, const KernelBank& bank, const Mlp& head) {
  if (scores.empty()) throw Error(ErrorCode::kEmptyHypothesis, "no hypothesis sentences to fuse");
  bank.validate();
  FusionResult result;
  result.method = FusionMethod::kKernel;
  result.per_sentence_scores.assign(scores.begin(), scores.end());
  result.pooled.assign(bank.size(), 0.0);
  for (double s : scores) {
    const auto v = kernel_vector(s, bank);
    for (std::size_t j = 0; j < v.size(); ++j) result.pooled[j] += v[j];
  }
  const double m = static_cast<double>(scores.size());
  for (auto& v : result.pooled) v /= m;
  result.sample_score = sigmoid(head.forward(result.pooled).front());
  return result;
}

}  // namespace r2f
