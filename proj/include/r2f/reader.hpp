#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "r2f/mlp.hpp"

namespace r2f {

class Rng;

// A hypothesis sentence with its evidence in ascending premise order.
struct ReaderInput {
  std::string hypothesis_sentence;
  std::vector<std::string> evidence_sentences;
};

// Lexical features standing in for a pretrained encoder's view of
// "[CLS] hypothesis [SEP] evidence... [SEP]".
enum class Feature : std::size_t {
  kUnigramPrecision,
  kUnigramRecall,
  kUnigramF1,
  kBigramF1,
  kContentCoverage,
  kNumericCoverage,
  kCapitalizedCoverage,
  kLengthRatio,
  kEvidenceFraction,
  kMaxSentenceRouge1,
};
inline constexpr std::size_t kFeatureCount = 10;
const std::array<std::string_view, kFeatureCount>& feature_names();

struct FeatureConfig {
  // Retrieval K; normalizes the evidence-count feature.
  std::size_t evidence_slots = 5;
};

// Throws kEmptyHypothesis for an empty/whitespace hypothesis sentence.
std::vector<double> extract_features(const ReaderInput& input, const FeatureConfig& config = {});

struct ReaderConfig {
  std::vector<std::size_t> encoder_hidden{64};
  std::size_t inference_dim = 32;
  std::vector<std::size_t> head_hidden{64};
};

// Encoder: features -> hidden (tanh) -> inference vector (tanh).
// Head: inference vector -> hidden (tanh) -> logit.
struct ReaderParams {
  Mlp encoder;
  Mlp head;

  static ReaderParams create(const ReaderConfig& config, std::size_t feature_dim = kFeatureCount);
  void init_uniform(Rng& rng, double scale, bool include_bias);
  std::size_t feature_dim() const { return encoder.input_dim(); }
  std::size_t inference_dim() const { return encoder.output_dim(); }
  // Throws kShapeMismatch unless encoder and head chain up to one logit.
  void validate() const;
};

using InferenceVector = std::vector<double>;

InferenceVector encode_features(std::span<const double> features, const ReaderParams& params,
                                Mlp::Trace* trace = nullptr);
InferenceVector encode(const ReaderInput& input, const ReaderParams& params,
                       const FeatureConfig& config = {});

double credibility_logit(const InferenceVector& h, const ReaderParams& params,
                         Mlp::Trace* trace = nullptr);
double credibility(const InferenceVector& h, const ReaderParams& params);

struct SentenceScore {
  double score = 0.0;
  InferenceVector vector;
  bool is_substring = false;
};

// Substring-matched sentences short-circuit to score 1.0 with an all-ones
// sentinel vector.
SentenceScore score_sentence(const ReaderInput& input, bool is_substring,
                             const ReaderParams& params, const FeatureConfig& config = {});
InferenceVector substring_sentinel(std::size_t dim);

}  // namespace r2f
