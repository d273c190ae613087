#include "r2f/metrics.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "r2f/error.hpp"
#include "r2f/io.hpp"

namespace r2f {
namespace {

void put(std::ostringstream& out, const char* key, double value) {
  out << key << '=' << format_double(value) << '\n';
}

void put(std::ostringstream& out, const char* key, std::size_t value) {
  out << key << '=' << value << '\n';
}

std::string doc_fields(const DocEvalReport& r, const std::string& prefix) {
  std::ostringstream out;
  const auto key = [&](const char* name) { return prefix + name; };
  put(out, key("entailment_precision").c_str(), r.entailment.precision);
  put(out, key("entailment_recall").c_str(), r.entailment.recall);
  put(out, key("entailment_f1").c_str(), r.entailment.f1);
  put(out, key("not_entailment_precision").c_str(), r.not_entailment.precision);
  put(out, key("not_entailment_recall").c_str(), r.not_entailment.recall);
  put(out, key("not_entailment_f1").c_str(), r.not_entailment.f1);
  put(out, key("micro_f1").c_str(), r.micro_f1);
  put(out, key("macro_f1").c_str(), r.macro_f1);
  put(out, key("accuracy").c_str(), r.accuracy);
  put(out, key("tp").c_str(), r.confusion.gold_pos_pred_pos);
  put(out, key("fn").c_str(), r.confusion.gold_pos_pred_neg);
  put(out, key("fp").c_str(), r.confusion.gold_neg_pred_pos);
  put(out, key("tn").c_str(), r.confusion.gold_neg_pred_neg);
  return out.str();
}

// Turns key=value lines into a two-row TSV table.
std::string as_table(const std::string& text) {
  std::string header, values;
  for (const auto& line : split(text, '\n')) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    if (!header.empty()) {
      header += '\t';
      values += '\t';
    }
    header += line.substr(0, eq);
    values += line.substr(eq + 1);
  }
  return header + '\n' + values + '\n';
}

}  // namespace

Prf prf(std::size_t tp, std::size_t fp, std::size_t fn) {
  Prf out;
  if (tp + fp > 0) out.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  if (tp + fn > 0) out.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  // 2PR/(P+R) in its single-division form 2tp/(2tp+fp+fn)
  if (tp > 0) out.f1 = static_cast<double>(2 * tp) / static_cast<double>(2 * tp + fp + fn);
  return out;
}

DocEvalReport doc_eval_from_counts(const ConfusionCounts& c) {
  DocEvalReport r;
  r.confusion = c;
  r.entailment = prf(c.gold_pos_pred_pos, c.gold_neg_pred_pos, c.gold_pos_pred_neg);
  r.not_entailment = prf(c.gold_neg_pred_neg, c.gold_pos_pred_neg, c.gold_neg_pred_pos);
  // pooled over both classes every error is one fp and one fn
  const std::size_t correct = c.gold_pos_pred_pos + c.gold_neg_pred_neg;
  const std::size_t wrong = c.gold_pos_pred_neg + c.gold_neg_pred_pos;
  r.micro_f1 = prf(correct, wrong, wrong).f1;
  r.macro_f1 = (r.entailment.f1 + r.not_entailment.f1) / 2.0;
  r.accuracy = c.total() == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(c.total());
  return r;
}

DocEvalReport doc_eval(const std::vector<bool>& predicted, const std::vector<bool>& gold) {
  if (predicted.size() != gold.size()) {
    throw Error(ErrorCode::kLengthMismatch, "predictions (" + std::to_string(predicted.size()) +
                                                ") and gold labels (" +
                                                std::to_string(gold.size()) + ") differ");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i]) {
      ++(predicted[i] ? c.gold_pos_pred_pos : c.gold_pos_pred_neg);
    } else {
      ++(predicted[i] ? c.gold_neg_pred_pos : c.gold_neg_pred_neg);
    }
  }
  return doc_eval_from_counts(c);
}

std::string DocEvalReport::to_text() const { return doc_fields(*this, ""); }

std::string DocEvalReport::to_table() const { return as_table(to_text()); }

EvidenceOutcome evidence_eval(std::span<const std::size_t> retrieved,
                              const std::vector<std::vector<std::size_t>>& gold_groups) {
  EvidenceOutcome out;
  const std::set<std::size_t> got(retrieved.begin(), retrieved.end());
  std::set<std::size_t> gold_union;
  for (const auto& group : gold_groups) {
    gold_union.insert(group.begin(), group.end());
    if (!group.empty() &&
        std::all_of(group.begin(), group.end(), [&](std::size_t i) { return got.count(i) > 0; })) {
      out.hit = true;
    }
  }
  if (!got.empty()) {
    std::size_t inside = 0;
    for (std::size_t i : got) inside += gold_union.count(i);
    out.precision = static_cast<double>(inside) / static_cast<double>(got.size());
  }
  return out;
}

double full_accuracy(const std::vector<bool>& hits, const std::vector<bool>& predicted,
                     const std::vector<bool>& gold) {
  if (hits.size() != predicted.size() || hits.size() != gold.size()) {
    throw Error(ErrorCode::kLengthMismatch, "full accuracy inputs differ in length");
  }
  if (hits.empty()) return 0.0;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < hits.size(); ++i) ok += hits[i] && predicted[i] == gold[i];
  return static_cast<double>(ok) / static_cast<double>(hits.size());
}

SentenceEvalReport sentence_eval(std::span<const SentenceJudgement> judgements) {
  SentenceEvalReport r;
  r.sentences = judgements.size();
  std::size_t evidence_hits = 0;
  double precision_sum = 0.0;
  std::size_t waived_hits = 0;
  std::vector<bool> hits, predicted, gold;
  for (const auto& j : judgements) {
    const bool has_groups =
        std::any_of(j.gold_groups.begin(), j.gold_groups.end(), [](const auto& g) { return !g.empty(); });
    bool hit = false;
    if (j.is_substring) {
      hit = true;
    } else if (has_groups) {
      const auto outcome = evidence_eval(j.retrieved, j.gold_groups);
      ++r.evidence_sentences;
      evidence_hits += outcome.hit;
      precision_sum += outcome.precision;
      hit = outcome.hit;
    } else {
      hit = !j.gold_entailed;
    }
    // substring matches are entailed by construction
    const bool predicted_label = j.is_substring ? true : j.predicted_entailed;
    waived_hits += hit;
    hits.push_back(hit);
    predicted.push_back(predicted_label);
    gold.push_back(j.gold_entailed);
  }
  if (r.evidence_sentences > 0) {
    r.evidence.recall = static_cast<double>(evidence_hits) / r.evidence_sentences;
    r.evidence.precision = precision_sum / r.evidence_sentences;
    if (r.evidence.precision + r.evidence.recall > 0.0) {
      r.evidence.f1 = 2.0 * r.evidence.precision * r.evidence.recall /
                      (r.evidence.precision + r.evidence.recall);
    }
  }
  if (!judgements.empty()) {
    r.evidence_recall_waived = static_cast<double>(waived_hits) / judgements.size();
  }
  r.labels = doc_eval(predicted, gold);
  r.full_accuracy = full_accuracy(hits, predicted, gold);
  return r;
}

std::string SentenceEvalReport::to_text() const {
  std::ostringstream out;
  put(out, "evidence_precision", evidence.precision);
  put(out, "evidence_recall", evidence.recall);
  put(out, "evidence_f1", evidence.f1);
  put(out, "evidence_sentences", evidence_sentences);
  put(out, "evidence_recall_waived", evidence_recall_waived);
  put(out, "label_micro_f1", labels.micro_f1);
  put(out, "label_macro_f1", labels.macro_f1);
  put(out, "label_accuracy", labels.accuracy);
  put(out, "full_accuracy", full_accuracy);
  put(out, "sentences", sentences);
  return out.str();
}

std::string SentenceEvalReport::to_table() const { return as_table(to_text()); }

}  // namespace r2f
