#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "r2f/corpus.hpp"
#include "r2f/metrics.hpp"
#include "r2f/retrieval.hpp"
#include "r2f/training.hpp"

namespace r2f {

// One line of an evidence file.
struct EvidenceRecord {
  std::string id;
  EvidenceSelection selection;
  RetrievalMethod method = RetrievalMethod::kRouge1;
  std::size_t k = 0;

  bool operator==(const EvidenceRecord&) const = default;
};

// Runs retrieval for every hypothesis sentence of every pair, in file order.
std::vector<EvidenceRecord> retrieve_pairs(const std::vector<DocPair>& pairs,
                                           const RetrievalConfig& config,
                                           const EmbeddingStore* embeddings = nullptr,
                                           const AbbreviationSet& abbreviations =
                                               AbbreviationSet::defaults());

std::string serialize_evidence(const std::vector<EvidenceRecord>& records);
std::vector<EvidenceRecord> parse_evidence(std::string_view content);
std::vector<EvidenceRecord> load_evidence(const std::string& path);

// Pair id -> selections ordered by hypothesis index. Throws kValidation on
// gaps or repeats.
using EvidenceMap = std::map<std::string, std::vector<EvidenceSelection>>;
EvidenceMap group_evidence(const std::vector<EvidenceRecord>& records);

// Feature extraction for every pair; each pair needs one selection per
// hypothesis sentence.
std::vector<PreparedSample> prepare_samples(const std::vector<DocPair>& pairs,
                                            const EvidenceMap& evidence,
                                            const FeatureConfig& features,
                                            const AbbreviationSet& abbreviations =
                                                AbbreviationSet::defaults());

struct SentenceOutput {
  std::size_t index = 0;
  double score = 0.0;
  bool label = false;
  std::vector<std::size_t> evidence_indices;
  bool is_substring = false;
};

struct PredictionRecord {
  std::string id;
  bool label = false;
  double score = 0.0;
  FusionMethod fusion = FusionMethod::kScoreMin;
  std::optional<std::size_t> argmin_index;
  std::vector<SentenceOutput> sentences;
};

std::vector<PredictionRecord> predict_samples(const Model& model,
                                              const std::vector<PreparedSample>& samples,
                                              const EvidenceMap& evidence, double threshold);

std::string serialize_predictions(const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> parse_predictions(std::string_view content);
std::vector<PredictionRecord> load_predictions(const std::string& path);

// Gold labels come from the pairs; every labeled pair needs a prediction.
DocEvalReport evaluate_documents(const std::vector<PredictionRecord>& predictions,
                                 const std::vector<DocPair>& pairs);

std::vector<SentenceJudgement> sentence_judgements(const std::vector<PredictionRecord>& predictions,
                                                   const std::vector<AnnotatedSample>& gold);

// Retrieve, train, predict and evaluate one configuration end to end.
struct ExperimentResult {
  TrainResult training;
  std::vector<EvidenceRecord> test_evidence;
  std::vector<PredictionRecord> predictions;
  DocEvalReport doc;
  std::optional<SentenceEvalReport> sentences;
};

struct ExperimentData {
  const std::vector<DocPair>* train = nullptr;
  const std::vector<DocPair>* dev = nullptr;
  const std::vector<DocPair>* test = nullptr;
  const std::vector<AnnotatedSample>* test_gold = nullptr;  // optional
  const EmbeddingStore* embeddings = nullptr;               // optional
  const AbbreviationSet* abbreviations = nullptr;           // optional
};

ExperimentResult run_experiment(const ExperimentData& data, const RetrievalConfig& retrieval,
                                ModelConfig model_config, const TrainConfig& train_config,
                                const TrainLogger& logger = {});

struct SweepEntry {
  std::size_t k = 0;
  DocEvalReport doc;
  std::optional<SentenceEvalReport> sentences;

  // "k=<K>" followed by the document and sentence report lines.
  std::string to_text() const;
};

// Re-runs the experiment once per K with evidence_slots following K.
std::vector<SweepEntry> sweep_k(const ExperimentData& data, const RetrievalConfig& retrieval,
                                const std::vector<std::size_t>& ks, const ModelConfig& model_config,
                                const TrainConfig& train_config);

}  // namespace r2f
