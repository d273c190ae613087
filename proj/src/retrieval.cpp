#include "r2f/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "r2f/error.hpp"
#include "r2f/io.hpp"
#include "r2f/random.hpp"

namespace r2f {

std::string to_string(RetrievalMethod method) {
  switch (method) {
    case RetrievalMethod::kRouge1: return "rouge1";
    case RetrievalMethod::kBm25: return "bm25";
    case RetrievalMethod::kEmbeddingCosine: return "embedding_cosine";
    case RetrievalMethod::kRandom: return "random";
  }
  return "unknown";
}

RetrievalMethod parse_retrieval_method(std::string_view name) {
  if (name == "rouge1") return RetrievalMethod::kRouge1;
  if (name == "bm25") return RetrievalMethod::kBm25;
  if (name == "embedding_cosine") return RetrievalMethod::kEmbeddingCosine;
  if (name == "random") return RetrievalMethod::kRandom;
  throw Error(ErrorCode::kInvalidArgument, "unknown retrieval method '" + std::string(name) + "'");
}

std::string to_string(RougeVariant variant) {
  switch (variant) {
    case RougeVariant::kF1: return "f1";
    case RougeVariant::kPrecision: return "precision";
    case RougeVariant::kRecall: return "recall";
  }
  return "unknown";
}

RougeVariant parse_rouge_variant(std::string_view name) {
  if (name == "f1") return RougeVariant::kF1;
  if (name == "precision") return RougeVariant::kPrecision;
  if (name == "recall") return RougeVariant::kRecall;
  throw Error(ErrorCode::kInvalidArgument, "unknown rouge variant '" + std::string(name) + "'");
}

void RetrievalConfig::validate() const {
  if (k < 1) throw Error(ErrorCode::kValidation, "retrieval K must be >= 1");
  if (!(bm25_k1 >= 0.0)) throw Error(ErrorCode::kValidation, "bm25_k1 must be >= 0");
  if (!(bm25_b >= 0.0 && bm25_b <= 1.0)) throw Error(ErrorCode::kValidation, "bm25_b must be in [0,1]");
  if (!(bm25_idf_epsilon > 0.0)) throw Error(ErrorCode::kValidation, "bm25_idf_epsilon must be > 0");
}

double rouge1_score(const TokenSeq& a, const TokenSeq& b, RougeVariant variant) {
  if (a.empty() || b.empty()) return 0.0;
  const auto& small = a.counts().size() <= b.counts().size() ? a : b;
  const auto& large = &small == &a ? b : a;
  long overlap = 0;
  for (const auto& [token, count] : small.counts()) {
    overlap += std::min(count, large.count(token));
  }
  if (overlap == 0) return 0.0;
  const double precision = static_cast<double>(overlap) / static_cast<double>(a.size());
  const double recall = static_cast<double>(overlap) / static_cast<double>(b.size());
  switch (variant) {
    case RougeVariant::kPrecision: return precision;
    case RougeVariant::kRecall: return recall;
    case RougeVariant::kF1: break;
  }
  // 2PR/(P+R) == 2o/(|a|+|b|); the latter is exact-symmetric in a and b
  return 2.0 * static_cast<double>(overlap) / static_cast<double>(a.size() + b.size());
}

Bm25Index::Bm25Index(std::span<const TokenSeq> corpus, Bm25Params params) : params_(params) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "BM25 corpus is empty");
  std::unordered_map<std::string, int> document_frequency;
  std::size_t total = 0;
  // Terms in first-seen order so the idf floor is summed deterministically.
  std::vector<std::string> order;
  for (const auto& doc : corpus) {
    doc_counts_.push_back(doc.counts());
    doc_len_.push_back(doc.size());
    total += doc.size();
    for (const auto& token : doc.tokens()) {
      if (document_frequency.try_emplace(token, 0).second) order.push_back(token);
    }
    for (const auto& [token, _] : doc.counts()) ++document_frequency[token];
  }
  const double n = static_cast<double>(corpus.size());
  avgdl_ = static_cast<double>(total) / n;

  double positive_sum = 0.0;
  std::size_t positive_count = 0;
  std::vector<std::string> negative;
  for (const auto& token : order) {
    const double df = document_frequency[token];
    const double value = std::log((n - df + 0.5) / (df + 0.5));
    idf_[token] = value;
    if (value > 0.0) {
      positive_sum += value;
      ++positive_count;
    } else if (value < 0.0) {
      negative.push_back(token);
    }
  }
  const double floor_value =
      positive_count == 0 ? 0.0 : params_.idf_epsilon * positive_sum / positive_count;
  for (const auto& token : negative) idf_[token] = floor_value;
}

double Bm25Index::idf(const std::string& term) const {
  const auto it = idf_.find(term);
  return it == idf_.end() ? 0.0 : it->second;
}

std::vector<double> Bm25Index::scores(const TokenSeq& query) const {
  std::vector<double> out(doc_counts_.size(), 0.0);
  for (const auto& term : query.tokens()) {
    const auto it = idf_.find(term);
    if (it == idf_.end()) continue;
    for (std::size_t d = 0; d < doc_counts_.size(); ++d) {
      const auto tf_it = doc_counts_[d].find(term);
      if (tf_it == doc_counts_[d].end()) continue;
      const double tf = tf_it->second;
      // avgdl > 0 whenever any document holds the term
      const double norm = params_.k1 * (1.0 - params_.b + params_.b * doc_len_[d] / avgdl_);
      out[d] += it->second * tf * (params_.k1 + 1.0) / (tf + norm);
    }
  }
  return out;
}

std::vector<double> bm25_scores(const TokenSeq& query, std::span<const TokenSeq> corpus,
                                Bm25Params params) {
  return Bm25Index(corpus, params).scores(query);
}

double cosine_score(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "cosine: dimensions " + std::to_string(u.size()) +
                                                   " and " + std::to_string(v.size()));
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw Error(ErrorCode::kZeroVector, "cosine of a zero vector");
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

bool substring_check(std::string_view hyp_sentence, std::string_view premise_text) {
  const std::string needle = normalize_for_substring(hyp_sentence);
  if (needle.empty()) return false;
  return normalize_for_substring(premise_text).find(needle) != std::string::npos;
}

PremiseIndex::PremiseIndex(std::string pair_id, std::string premise_text, SentenceList sentences)
    : pair_id_(std::move(pair_id)),
      text_(std::move(premise_text)),
      normalized_(normalize_for_substring(text_)),
      sentences_(std::move(sentences)) {
  tokens_.reserve(sentences_.size());
  for (const auto& s : sentences_.sentences) tokens_.push_back(tokenize(s));
}

std::vector<double> relevance_scores(const RetrievalQuery& query, const PremiseIndex& premise,
                                     const RetrievalConfig& config,
                                     const EmbeddingStore* embeddings) {
  const std::size_t n = premise.size();
  switch (config.method) {
    case RetrievalMethod::kRouge1: {
      const TokenSeq hyp = tokenize(query.sentence);
      std::vector<double> out(n);
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = rouge1_score(hyp, premise.tokens()[i], config.rouge_variant);
      }
      return out;
    }
    case RetrievalMethod::kBm25:
      return bm25_scores(tokenize(query.sentence), premise.tokens(),
                         {config.bm25_k1, config.bm25_b, config.bm25_idf_epsilon});
    case RetrievalMethod::kEmbeddingCosine: {
      if (embeddings == nullptr) {
        throw Error(ErrorCode::kMissingEmbeddings, "embedding_cosine retrieval needs an embedding store");
      }
      const auto hyp = embeddings->find(EmbeddingStore::hypothesis_key(query.pair_id),
                                        query.hypothesis_index);
      if (!hyp) {
        throw Error(ErrorCode::kMissingEmbeddings,
                    "no embedding for " + EmbeddingStore::hypothesis_key(query.pair_id) + " " +
                        std::to_string(query.hypothesis_index));
      }
      std::vector<double> out(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto vec = embeddings->find(EmbeddingStore::premise_key(query.pair_id), i);
        if (!vec) {
          throw Error(ErrorCode::kMissingEmbeddings,
                      "no embedding for " + EmbeddingStore::premise_key(query.pair_id) + " " +
                          std::to_string(i));
        }
        out[i] = cosine_score(*hyp, *vec);
      }
      return out;
    }
    case RetrievalMethod::kRandom:
      return std::vector<double>(n, 0.0);
  }
  return {};
}

EvidenceSelection select_evidence(const RetrievalQuery& query, const PremiseIndex& premise,
                                  const RetrievalConfig& config,
                                  const EmbeddingStore* embeddings) {
  config.validate();
  if (premise.size() == 0) throw Error(ErrorCode::kEmptyDocument, "premise has no sentences");
  EvidenceSelection selection;
  selection.hypothesis_index = query.hypothesis_index;

  const std::string needle = normalize_for_substring(query.sentence);
  if (!needle.empty() && premise.normalized_text().find(needle) != std::string::npos) {
    selection.is_substring = true;
    return selection;
  }

  const std::size_t n = premise.size();
  const std::size_t take = std::min(config.k, n);
  const std::vector<double> scores = relevance_scores(query, premise, config, embeddings);
  std::vector<std::size_t> chosen;
  if (config.method == RetrievalMethod::kRandom) {
    std::uint64_t seed = fnv1a64(query.pair_id, config.random_seed ^ 0x9e3779b97f4a7c15ULL);
    seed = fnv1a64(std::to_string(query.hypothesis_index), seed);
    Rng rng(seed);
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    for (std::size_t i = 0; i < take; ++i) {
      std::swap(pool[i], pool[i + rng.index(n - i)]);
    }
    chosen.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
  } else {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return scores[x] > scores[y]; });
    chosen.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(chosen.begin(), chosen.end());
  selection.evidence_indices = chosen;
  selection.relevance_scores.reserve(chosen.size());
  for (std::size_t idx : chosen) selection.relevance_scores.push_back(scores[idx]);
  return selection;
}

}  // namespace r2f
