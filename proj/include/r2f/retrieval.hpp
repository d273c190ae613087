#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "r2f/embeddings.hpp"
#include "r2f/text.hpp"

namespace r2f {

enum class RetrievalMethod { kRouge1, kBm25, kEmbeddingCosine, kRandom };
enum class RougeVariant { kF1, kPrecision, kRecall };

std::string to_string(RetrievalMethod method);
RetrievalMethod parse_retrieval_method(std::string_view name);
std::string to_string(RougeVariant variant);
RougeVariant parse_rouge_variant(std::string_view name);

struct RetrievalConfig {
  RetrievalMethod method = RetrievalMethod::kRouge1;
  std::size_t k = 5;
  double bm25_k1 = 1.5;
  double bm25_b = 0.75;
  double bm25_idf_epsilon = 0.25;
  RougeVariant rouge_variant = RougeVariant::kF1;
  std::uint64_t random_seed = 42;

  // Throws kValidation when a field is out of range.
  void validate() const;
  bool operator==(const RetrievalConfig&) const = default;
};

struct EvidenceSelection {
  std::size_t hypothesis_index = 0;
  std::vector<std::size_t> evidence_indices;  // ascending premise order
  std::vector<double> relevance_scores;       // parallel to evidence_indices
  bool is_substring = false;

  bool operator==(const EvidenceSelection&) const = default;
};

// Clipped unigram overlap. `a` plays the candidate (precision side) and `b`
// the reference (recall side); the F1 form is symmetric.
double rouge1_score(const TokenSeq& a, const TokenSeq& b,
                    RougeVariant variant = RougeVariant::kF1);

struct Bm25Params {
  double k1 = 1.5;
  double b = 0.75;
  double idf_epsilon = 0.25;
};

// Okapi BM25 over a small per-sample corpus. Negative idf values are
// replaced by idf_epsilon times the mean of the positive idf values.
class Bm25Index {
 public:
  Bm25Index(std::span<const TokenSeq> corpus, Bm25Params params = {});

  // One score per corpus document; repeated query terms count repeatedly.
  std::vector<double> scores(const TokenSeq& query) const;

  double idf(const std::string& term) const;
  double average_length() const { return avgdl_; }

 private:
  Bm25Params params_;
  std::vector<std::unordered_map<std::string, int>> doc_counts_;
  std::vector<std::size_t> doc_len_;
  std::unordered_map<std::string, double> idf_;
  double avgdl_ = 0.0;
};

std::vector<double> bm25_scores(const TokenSeq& query, std::span<const TokenSeq> corpus,
                                Bm25Params params = {});

double cosine_score(std::span<const double> u, std::span<const double> v);

bool substring_check(std::string_view hyp_sentence, std::string_view premise_text);

// Identifies one hypothesis sentence for seeding and embedding lookup.
struct RetrievalQuery {
  std::string pair_id;
  std::size_t hypothesis_index = 0;
  std::string sentence;
};

// Premise with its tokenized sentences cached for repeated queries.
class PremiseIndex {
 public:
  PremiseIndex(std::string pair_id, std::string premise_text, SentenceList sentences);

  const std::string& pair_id() const { return pair_id_; }
  const std::string& text() const { return text_; }
  const std::string& normalized_text() const { return normalized_; }
  const SentenceList& sentences() const { return sentences_; }
  std::span<const TokenSeq> tokens() const { return tokens_; }
  std::size_t size() const { return sentences_.size(); }

 private:
  std::string pair_id_;
  std::string text_;
  std::string normalized_;
  SentenceList sentences_;
  std::vector<TokenSeq> tokens_;
};

// Relevance of every premise sentence to the query under `config.method`.
// The random method has no relevance and returns zeros.
std::vector<double> relevance_scores(const RetrievalQuery& query, const PremiseIndex& premise,
                                     const RetrievalConfig& config,
                                     const EmbeddingStore* embeddings);

EvidenceSelection select_evidence(const RetrievalQuery& query, const PremiseIndex& premise,
                                  const RetrievalConfig& config,
                                  const EmbeddingStore* embeddings = nullptr);

}  // namespace r2f
