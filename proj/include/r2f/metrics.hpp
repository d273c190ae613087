#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace r2f {

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Each ratio is 0 when its denominator is 0.
Prf prf(std::size_t tp, std::size_t fp, std::size_t fn);

struct ConfusionCounts {
  // rows: gold, columns: predicted; index 1 = entailment
  std::size_t gold_pos_pred_pos = 0;
  std::size_t gold_pos_pred_neg = 0;
  std::size_t gold_neg_pred_pos = 0;
  std::size_t gold_neg_pred_neg = 0;

  std::size_t total() const {
    return gold_pos_pred_pos + gold_pos_pred_neg + gold_neg_pred_pos + gold_neg_pred_neg;
  }
};

struct DocEvalReport {
  Prf entailment;
  Prf not_entailment;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  ConfusionCounts confusion;

  // key=value lines with fixed field names.
  std::string to_text() const;
  // Header row plus one value row, tab separated.
  std::string to_table() const;
};

DocEvalReport doc_eval_from_counts(const ConfusionCounts& counts);
// Labels are true for entailment. Throws kLengthMismatch.
DocEvalReport doc_eval(const std::vector<bool>& predicted, const std::vector<bool>& gold);

struct EvidenceOutcome {
  bool hit = false;
  double precision = 0.0;
};

// hit: some gold group is a subset of `retrieved`; precision: share of
// retrieved indices inside the union of all gold groups.
EvidenceOutcome evidence_eval(std::span<const std::size_t> retrieved,
                              const std::vector<std::vector<std::size_t>>& gold_groups);

// One hypothesis sentence paired with its gold annotation.
struct SentenceJudgement {
  std::vector<std::size_t> retrieved;
  bool is_substring = false;
  bool predicted_entailed = false;
  bool gold_entailed = false;
  std::vector<std::vector<std::size_t>> gold_groups;
};

struct SentenceEvalReport {
  // Over sentences with gold groups that went through retrieval.
  Prf evidence;
  std::size_t evidence_sentences = 0;
  // Over all sentences: a hit, or a waived hit (substring match, or gold
  // not-entailment without evidence groups).
  double evidence_recall_waived = 0.0;
  DocEvalReport labels;
  double full_accuracy = 0.0;
  std::size_t sentences = 0;

  std::string to_text() const;
  std::string to_table() const;
};

SentenceEvalReport sentence_eval(std::span<const SentenceJudgement> judgements);

// Fraction of sentences whose hit flag is set and label is correct.
double full_accuracy(const std::vector<bool>& hits, const std::vector<bool>& predicted,
                     const std::vector<bool>& gold);

}  // namespace r2f
