#include "r2f/reader.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

#include "r2f/error.hpp"
#include "r2f/io.hpp"
#include "r2f/retrieval.hpp"
#include "r2f/text.hpp"
#include "utf8.hpp"

namespace r2f {
namespace {

std::size_t codepoint_length(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); i += utf8::decode(s, i).length) ++n;
  return n;
}

bool has_digit(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

using Bigrams = std::map<std::pair<std::string, std::string>, int>;

void add_bigrams(const TokenSeq& seq, Bigrams& out) {
  const auto& t = seq.tokens();
  for (std::size_t i = 0; i + 1 < t.size(); ++i) ++out[{t[i], t[i + 1]}];
}

double clipped_f1(long overlap, std::size_t left, std::size_t right) {
  if (overlap == 0 || left == 0 || right == 0) return 0.0;
  return 2.0 * static_cast<double>(overlap) / static_cast<double>(left + right);
}

// Fraction of `tokens` found in `present`; 1 when there is nothing to check.
double coverage(const std::vector<std::string>& tokens,
                const std::unordered_set<std::string>& present) {
  if (tokens.empty()) return 1.0;
  std::size_t hit = 0;
  for (const auto& t : tokens) hit += present.count(t);
  return static_cast<double>(hit) / static_cast<double>(tokens.size());
}

}  // namespace

const std::array<std::string_view, kFeatureCount>& feature_names() {
  static const std::array<std::string_view, kFeatureCount> names = {
      "unigram_precision", "unigram_recall",       "unigram_f1",      "bigram_f1",
      "content_coverage",  "numeric_coverage",     "capital_coverage", "length_ratio",
      "evidence_fraction", "max_sentence_rouge1",
  };
  return names;
}

std::vector<double> extract_features(const ReaderInput& input, const FeatureConfig& config) {
  if (normalize_for_substring(input.hypothesis_sentence).empty()) {
    throw Error(ErrorCode::kEmptyHypothesis, "hypothesis sentence is empty");
  }
  const TokenSeq hyp = tokenize(input.hypothesis_sentence);
  std::vector<TokenSeq> evidence;
  evidence.reserve(input.evidence_sentences.size());
  std::vector<std::string> all_evidence_tokens;
  for (const auto& s : input.evidence_sentences) {
    evidence.push_back(tokenize(s));
    const auto& t = evidence.back().tokens();
    all_evidence_tokens.insert(all_evidence_tokens.end(), t.begin(), t.end());
  }
  const TokenSeq joined(std::move(all_evidence_tokens));
  const std::unordered_set<std::string> present(joined.tokens().begin(), joined.tokens().end());

  std::vector<double> f(kFeatureCount, 0.0);
  auto at = [&f](Feature which) -> double& { return f[static_cast<std::size_t>(which)]; };

  long overlap = 0;
  for (const auto& [token, count] : hyp.counts()) overlap += std::min(count, joined.count(token));
  if (!hyp.empty() && !joined.empty()) {
    at(Feature::kUnigramPrecision) = static_cast<double>(overlap) / hyp.size();
    at(Feature::kUnigramRecall) = static_cast<double>(overlap) / joined.size();
  }
  at(Feature::kUnigramF1) = clipped_f1(overlap, hyp.size(), joined.size());

  // bigrams never span an evidence sentence boundary, so the multiset is
  // independent of evidence order
  Bigrams hyp_bigrams, evidence_bigrams;
  add_bigrams(hyp, hyp_bigrams);
  for (const auto& e : evidence) add_bigrams(e, evidence_bigrams);
  long bigram_overlap = 0;
  std::size_t hyp_bigram_total = 0, evidence_bigram_total = 0;
  for (const auto& [gram, count] : hyp_bigrams) {
    hyp_bigram_total += count;
    const auto it = evidence_bigrams.find(gram);
    if (it != evidence_bigrams.end()) bigram_overlap += std::min(count, it->second);
  }
  for (const auto& [gram, count] : evidence_bigrams) evidence_bigram_total += count;
  at(Feature::kBigramF1) = clipped_f1(bigram_overlap, hyp_bigram_total, evidence_bigram_total);

  std::vector<std::string> content, numeric;
  for (const auto& t : hyp.tokens()) {
    if (codepoint_length(t) > 3) content.push_back(t);
    if (has_digit(t)) numeric.push_back(t);
  }
  std::vector<std::string> capitalized;
  for (const auto& raw : word_runs(input.hypothesis_sentence)) {
    if (utf8::is_upper(utf8::decode(raw, 0).cp)) capitalized.push_back(tokenize(raw).tokens().front());
  }
  if (joined.empty()) {
    at(Feature::kContentCoverage) = content.empty() ? 1.0 : 0.0;
    at(Feature::kNumericCoverage) = numeric.empty() ? 1.0 : 0.0;
    at(Feature::kCapitalizedCoverage) = capitalized.empty() ? 1.0 : 0.0;
  } else {
    at(Feature::kContentCoverage) = coverage(content, present);
    at(Feature::kNumericCoverage) = coverage(numeric, present);
    at(Feature::kCapitalizedCoverage) = coverage(capitalized, present);
  }

  at(Feature::kLengthRatio) =
      joined.empty() ? 4.0
                     : std::clamp(static_cast<double>(hyp.size()) / joined.size(), 0.0, 4.0);
  const double slots = static_cast<double>(std::max<std::size_t>(config.evidence_slots, 1));
  at(Feature::kEvidenceFraction) = std::min(1.0, static_cast<double>(evidence.size()) / slots);
  double best = 0.0;
  for (const auto& e : evidence) best = std::max(best, rouge1_score(hyp, e));
  at(Feature::kMaxSentenceRouge1) = best;
  return f;
}

ReaderParams ReaderParams::create(const ReaderConfig& config, std::size_t feature_dim) {
  std::vector<std::size_t> encoder_widths{feature_dim};
  encoder_widths.insert(encoder_widths.end(), config.encoder_hidden.begin(),
                        config.encoder_hidden.end());
  encoder_widths.push_back(config.inference_dim);
  std::vector<std::size_t> head_widths{config.inference_dim};
  head_widths.insert(head_widths.end(), config.head_hidden.begin(), config.head_hidden.end());
  head_widths.push_back(1);
  return ReaderParams{Mlp(encoder_widths, Activation::kTanh),
                      Mlp(head_widths, Activation::kIdentity)};
}

void ReaderParams::init_uniform(Rng& rng, double scale, bool include_bias) {
  encoder.init_uniform(rng, scale, include_bias);
  head.init_uniform(rng, scale, include_bias);
}

void ReaderParams::validate() const {
  if (encoder.empty() || head.empty()) throw Error(ErrorCode::kShapeMismatch, "reader has no layers");
  if (encoder.output_activation() != Activation::kTanh) {
    throw Error(ErrorCode::kShapeMismatch, "encoder output must be tanh-activated");
  }
  if (head.input_dim() != encoder.output_dim() || head.output_dim() != 1) {
    throw Error(ErrorCode::kShapeMismatch, "credibility head does not match the encoder");
  }
}

InferenceVector encode_features(std::span<const double> features, const ReaderParams& params,
                                Mlp::Trace* trace) {
  return params.encoder.forward(features, trace);
}

InferenceVector encode(const ReaderInput& input, const ReaderParams& params,
                       const FeatureConfig& config) {
  params.validate();
  const auto features = extract_features(input, config);
  return encode_features(features, params);
}

double credibility_logit(const InferenceVector& h, const ReaderParams& params, Mlp::Trace* trace) {
  return params.head.forward(h, trace).front();
}

double credibility(const InferenceVector& h, const ReaderParams& params) {
  return sigmoid(credibility_logit(h, params));
}

InferenceVector substring_sentinel(std::size_t dim) { return InferenceVector(dim, 1.0); }

SentenceScore score_sentence(const ReaderInput& input, bool is_substring,
                             const ReaderParams& params, const FeatureConfig& config) {
  if (is_substring) return {1.0, substring_sentinel(params.inference_dim()), true};
  InferenceVector h = encode(input, params, config);
  const double score = credibility(h, params);
  return {score, std::move(h), false};
}

}  // namespace r2f
