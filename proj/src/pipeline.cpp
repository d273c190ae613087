#include "r2f/pipeline.hpp"

#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "r2f/error.hpp"
#include "r2f/io.hpp"

namespace r2f {
namespace {

using nlohmann::json;

template <typename Fn>
void for_each_json_line(std::string_view content, Fn&& fn) {
  std::size_t line_no = 0;
  for (auto& line : split(content, '\n')) {
    ++line_no;
    if (trim(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
      fn(record, line_no);
    } catch (const json::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
}

std::string label_name(bool entailed) {
  return to_string(entailed ? Label::kEntailment : Label::kNotEntailment);
}

}  // namespace

std::vector<EvidenceRecord> retrieve_pairs(const std::vector<DocPair>& pairs,
                                           const RetrievalConfig& config,
                                           const EmbeddingStore* embeddings,
                                           const AbbreviationSet& abbreviations) {
  config.validate();
  std::vector<EvidenceRecord> out;
  for (const auto& pair : pairs) {
    const SentenceList hypothesis = split_sentences(pair.hypothesis, abbreviations);
    const PremiseIndex premise(pair.id, pair.premise, split_sentences(pair.premise, abbreviations));
    for (std::size_t i = 0; i < hypothesis.size(); ++i) {
      const RetrievalQuery query{pair.id, i, hypothesis[i]};
      out.push_back({pair.id, select_evidence(query, premise, config, embeddings), config.method,
                     config.k});
    }
  }
  return out;
}

std::string serialize_evidence(const std::vector<EvidenceRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    json record = {{"id", r.id},
                   {"hypothesis_index", r.selection.hypothesis_index},
                   {"evidence_indices", r.selection.evidence_indices},
                   {"relevance_scores", r.selection.relevance_scores},
                   {"is_substring", r.selection.is_substring},
                   {"method", to_string(r.method)},
                   {"k", r.k}};
    out += record.dump();
    out += '\n';
  }
  return out;
}

std::vector<EvidenceRecord> parse_evidence(std::string_view content) {
  std::vector<EvidenceRecord> out;
  for_each_json_line(content, [&](const json& j, std::size_t line) {
    EvidenceRecord r;
    r.id = j.at("id").get<std::string>();
    r.selection.hypothesis_index = j.at("hypothesis_index").get<std::size_t>();
    r.selection.evidence_indices = j.at("evidence_indices").get<std::vector<std::size_t>>();
    r.selection.relevance_scores = j.at("relevance_scores").get<std::vector<double>>();
    r.selection.is_substring = j.at("is_substring").get<bool>();
    r.method = parse_retrieval_method(j.at("method").get<std::string>());
    r.k = j.at("k").get<std::size_t>();
    if (r.selection.relevance_scores.size() != r.selection.evidence_indices.size()) {
      throw ParseError(line, "relevance_scores and evidence_indices differ in length");
    }
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<EvidenceRecord> load_evidence(const std::string& path) {
  return parse_evidence(read_file(path));
}

EvidenceMap group_evidence(const std::vector<EvidenceRecord>& records) {
  EvidenceMap out;
  for (const auto& r : records) {
    auto& list = out[r.id];
    if (r.selection.hypothesis_index != list.size()) {
      throw Error(ErrorCode::kValidation, "evidence for '" + r.id + "' is out of order at sentence " +
                                              std::to_string(r.selection.hypothesis_index));
    }
    list.push_back(r.selection);
  }
  return out;
}

std::vector<PreparedSample> prepare_samples(const std::vector<DocPair>& pairs,
                                            const EvidenceMap& evidence,
                                            const FeatureConfig& features,
                                            const AbbreviationSet& abbreviations) {
  std::vector<PreparedSample> out;
  out.reserve(pairs.size());
  for (const auto& pair : pairs) {
    const auto it = evidence.find(pair.id);
    if (it == evidence.end()) {
      throw Error(ErrorCode::kValidation, "no evidence records for pair '" + pair.id + "'");
    }
    const SentenceList hypothesis = split_sentences(pair.hypothesis, abbreviations);
    const SentenceList premise = split_sentences(pair.premise, abbreviations);
    if (it->second.size() != hypothesis.size()) {
      throw Error(ErrorCode::kValidation,
                  "pair '" + pair.id + "' has " + std::to_string(hypothesis.size()) +
                      " hypothesis sentences but " + std::to_string(it->second.size()) +
                      " evidence records");
    }
    PreparedSample sample;
    sample.id = pair.id;
    if (pair.label) sample.label = is_entailment(*pair.label);
    for (std::size_t i = 0; i < hypothesis.size(); ++i) {
      const EvidenceSelection& sel = it->second[i];
      PreparedSentence sentence;
      sentence.is_substring = sel.is_substring;
      if (!sel.is_substring) {
        ReaderInput input{hypothesis[i], {}};
        for (std::size_t idx : sel.evidence_indices) {
          if (idx >= premise.size()) {
            throw Error(ErrorCode::kValidation, "evidence index " + std::to_string(idx) +
                                                    " outside premise of pair '" + pair.id + "'");
          }
          input.evidence_sentences.push_back(premise[idx]);
        }
        sentence.features = extract_features(input, features);
      }
      sample.sentences.push_back(std::move(sentence));
    }
    out.push_back(std::move(sample));
  }
  return out;
}

std::vector<PredictionRecord> predict_samples(const Model& model,
                                              const std::vector<PreparedSample>& samples,
                                              const EvidenceMap& evidence, double threshold) {
  std::vector<PredictionRecord> out;
  out.reserve(samples.size());
  for (const auto& sample : samples) {
    const SamplePrediction p = predict(model, sample, threshold);
    const auto& selections = evidence.at(sample.id);
    PredictionRecord r;
    r.id = sample.id;
    r.label = p.label;
    r.score = p.score;
    r.fusion = model.fusion;
    r.argmin_index = p.argmin_index;
    for (std::size_t i = 0; i < sample.sentences.size(); ++i) {
      r.sentences.push_back({i, p.sentence_scores[i], p.sentence_labels[i],
                             selections[i].evidence_indices, sample.sentences[i].is_substring});
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string serialize_predictions(const std::vector<PredictionRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    json sentences = json::array();
    for (const auto& s : r.sentences) {
      sentences.push_back({{"index", s.index},
                           {"score", s.score},
                           {"label", label_name(s.label)},
                           {"evidence_indices", s.evidence_indices},
                           {"is_substring", s.is_substring}});
    }
    json record = {{"id", r.id},
                   {"label", label_name(r.label)},
                   {"score", r.score},
                   {"fusion", to_string(r.fusion)},
                   {"argmin_index", r.argmin_index ? json(*r.argmin_index) : json(nullptr)},
                   {"sentences", std::move(sentences)}};
    out += record.dump();
    out += '\n';
  }
  return out;
}

std::vector<PredictionRecord> parse_predictions(std::string_view content) {
  std::vector<PredictionRecord> out;
  for_each_json_line(content, [&](const json& j, std::size_t) {
    PredictionRecord r;
    r.id = j.at("id").get<std::string>();
    r.label = is_entailment(parse_label(j.at("label").get<std::string>()));
    r.score = j.at("score").get<double>();
    r.fusion = parse_fusion_method(j.value("fusion", std::string("score_min")));
    if (j.contains("argmin_index") && !j.at("argmin_index").is_null()) {
      r.argmin_index = j.at("argmin_index").get<std::size_t>();
    }
    for (const auto& s : j.at("sentences")) {
      r.sentences.push_back({s.at("index").get<std::size_t>(), s.at("score").get<double>(),
                             is_entailment(parse_label(s.at("label").get<std::string>())),
                             s.at("evidence_indices").get<std::vector<std::size_t>>(),
                             s.at("is_substring").get<bool>()});
    }
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<PredictionRecord> load_predictions(const std::string& path) {
  return parse_predictions(read_file(path));
}

DocEvalReport evaluate_documents(const std::vector<PredictionRecord>& predictions,
                                 const std::vector<DocPair>& pairs) {
  std::unordered_map<std::string, const PredictionRecord*> by_id;
  for (const auto& p : predictions) by_id[p.id] = &p;
  std::vector<bool> predicted, gold;
  for (const auto& pair : pairs) {
    if (!pair.label) continue;
    const auto it = by_id.find(pair.id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kValidation, "no prediction for pair '" + pair.id + "'");
    }
    predicted.push_back(it->second->label);
    gold.push_back(is_entailment(*pair.label));
  }
  if (gold.empty()) throw Error(ErrorCode::kEmptyDataset, "no labeled pairs to evaluate");
  return doc_eval(predicted, gold);
}

std::vector<SentenceJudgement> sentence_judgements(const std::vector<PredictionRecord>& predictions,
                                                   const std::vector<AnnotatedSample>& gold) {
  std::unordered_map<std::string, const PredictionRecord*> by_id;
  for (const auto& p : predictions) by_id[p.id] = &p;
  std::vector<SentenceJudgement> out;
  for (const auto& sample : gold) {
    const auto it = by_id.find(sample.pair.id);
    if (it == by_id.end()) {
      throw Error(ErrorCode::kValidation, "no prediction for annotated pair '" + sample.pair.id + "'");
    }
    const auto& sentences = it->second->sentences;
    if (sentences.size() != sample.hypothesis_sentences.size()) {
      throw Error(ErrorCode::kValidation,
                  "pair '" + sample.pair.id + "': " + std::to_string(sentences.size()) +
                      " predicted sentences vs " +
                      std::to_string(sample.hypothesis_sentences.size()) + " annotated");
    }
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      const auto& annotated = sample.hypothesis_sentences[i];
      out.push_back({sentences[i].evidence_indices, sentences[i].is_substring, sentences[i].label,
                     is_entailment(annotated.label), annotated.evidence_groups});
    }
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentData& data, const RetrievalConfig& retrieval,
                                ModelConfig model_config, const TrainConfig& train_config,
                                const TrainLogger& logger) {
  if (data.train == nullptr || data.dev == nullptr || data.test == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "experiment needs train, dev and test pairs");
  }
  const FeatureConfig features{model_config.evidence_slots};
  const AbbreviationSet& abbreviations =
      data.abbreviations != nullptr ? *data.abbreviations : AbbreviationSet::defaults();
  const auto prepare = [&](const std::vector<DocPair>& pairs, std::vector<EvidenceRecord>* keep) {
    auto records = retrieve_pairs(pairs, retrieval, data.embeddings, abbreviations);
    auto samples = prepare_samples(pairs, group_evidence(records), features, abbreviations);
    if (keep != nullptr) *keep = std::move(records);
    return samples;
  };
  ExperimentResult result;
  const auto train_samples = prepare(*data.train, nullptr);
  const auto dev_samples = prepare(*data.dev, nullptr);
  const auto test_samples = prepare(*data.test, &result.test_evidence);
  result.training = train(train_samples, dev_samples, model_config, train_config, logger);
  result.predictions = predict_samples(result.training.model, test_samples,
                                       group_evidence(result.test_evidence), train_config.threshold);
  result.doc = evaluate_documents(result.predictions, *data.test);
  if (data.test_gold != nullptr) {
    const auto judgements = sentence_judgements(result.predictions, *data.test_gold);
    result.sentences = sentence_eval(judgements);
  }
  return result;
}

std::string SweepEntry::to_text() const {
  std::ostringstream out;
  out << "k=" << k << '\n' << doc.to_text();
  if (sentences) out << sentences->to_text();
  return out.str();
}

std::vector<SweepEntry> sweep_k(const ExperimentData& data, const RetrievalConfig& retrieval,
                                const std::vector<std::size_t>& ks, const ModelConfig& model_config,
                                const TrainConfig& train_config) {
  std::vector<SweepEntry> out;
  for (std::size_t k : ks) {
    RetrievalConfig r = retrieval;
    r.k = k;
    ModelConfig m = model_config;
    m.evidence_slots = k;
    const ExperimentResult result = run_experiment(data, r, m, train_config);
    out.push_back({k, result.doc, result.sentences});
  }
  return out;
}

}  // namespace r2f
