#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace r2f {

enum class Label { kEntailment, kNotEntailment };

std::string to_string(Label label);
// Accepts "entailment", "not_entailment", "not entailment" (any case).
Label parse_label(std::string_view text);
inline bool is_entailment(Label label) { return label == Label::kEntailment; }

struct DocPair {
  std::string id;
  std::string hypothesis;
  std::string premise;
  std::optional<Label> label;

  bool operator==(const DocPair&) const = default;
};

// JSON member names for the dataset fields, so differently named dumps can
// be read without conversion.
struct FieldMapping {
  std::string id = "id";
  std::string hypothesis = "hypothesis";
  std::string premise = "premise";
  std::string label = "label";
};

// One JSON object per line; blank lines are skipped. Throws ParseError with
// the line number, or Error(kDuplicateId / kEmptyField).
std::vector<DocPair> parse_pairs(std::string_view content, const FieldMapping& fields = {});
std::vector<DocPair> load_pairs(const std::string& path, const FieldMapping& fields = {});
std::string serialize_pairs(const std::vector<DocPair>& pairs, const FieldMapping& fields = {});
void save_pairs(const std::vector<DocPair>& pairs, const std::string& path,
                const FieldMapping& fields = {});

struct AnnotatedSentence {
  std::string text;
  Label label = Label::kEntailment;
  std::vector<std::vector<std::size_t>> evidence_groups;

  bool operator==(const AnnotatedSentence&) const = default;
};

struct AnnotatedSample {
  DocPair pair;
  std::vector<AnnotatedSentence> hypothesis_sentences;

  // Throws kValidation when an index is out of range, an entailed sentence
  // has no group, or an entailed document holds a non-entailed sentence.
  void validate(std::size_t premise_sentence_count) const;
  bool operator==(const AnnotatedSample&) const = default;
};

// Dataset record plus a "hypothesis_sentences" array of
// {"text", "label", "evidence_groups": [[i, ...], ...]}.
std::vector<AnnotatedSample> parse_annotations(std::string_view content,
                                               const FieldMapping& fields = {});
std::vector<AnnotatedSample> load_annotations(const std::string& path,
                                              const FieldMapping& fields = {});
std::string serialize_annotations(const std::vector<AnnotatedSample>& samples,
                                  const FieldMapping& fields = {});

struct DatasetStats {
  std::size_t total = 0;
  std::size_t entailment = 0;
  std::size_t not_entailment = 0;
  std::size_t unlabeled = 0;
  std::vector<std::size_t> edges;
  // edges.size() + 1 buckets: <e0, [e0,e1), ..., >=e_last
  std::vector<std::size_t> histogram;
  std::size_t over_500_words = 0;
  std::size_t over_1000_words = 0;
  double mean_words = 0.0;

  std::vector<std::string> bucket_names() const;
  std::string to_text() const;
};

// Length of a pair in words = tokens of hypothesis plus premise.
std::size_t pair_word_count(const DocPair& pair);
DatasetStats dataset_stats(const std::vector<DocPair>& pairs,
                           std::vector<std::size_t> edges = {150, 300, 500, 800, 1000});

struct SyntheticConfig {
  std::size_t train_size = 2000;
  std::size_t dev_size = 500;
  std::size_t test_size = 500;
  double corruption_rate = 0.5;
  std::uint64_t seed = 42;
  std::size_t min_premise_sentences = 8;
  std::size_t max_premise_sentences = 40;
  std::size_t min_hypothesis_sentences = 3;
  std::size_t max_hypothesis_sentences = 8;
  // Share of hypothesis sentences drawn from two premise sentences.
  double two_source_rate = 0.3;
  // Share of entailed hypothesis sentences copied verbatim.
  double verbatim_rate = 0.05;
  // Distinct people per premise; place and key figure are one each.
  std::size_t people_per_document = 2;

  void validate() const;
};

struct SyntheticSplit {
  std::vector<DocPair> pairs;
  std::vector<AnnotatedSample> gold;
};

struct SyntheticCorpus {
  SyntheticSplit train;
  SyntheticSplit dev;
  SyntheticSplit test;
};

// Template premises and derived hypotheses with full sentence-level gold.
SyntheticCorpus generate_synthetic(const SyntheticConfig& config);
SyntheticSplit generate_synthetic_split(const SyntheticConfig& config, std::size_t size,
                                        const std::string& id_prefix, std::uint64_t seed);

}  // namespace r2f
