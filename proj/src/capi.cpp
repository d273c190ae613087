#include "r2f/r2f.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>

#include "r2f/checkpoint.hpp"
#include "r2f/config.hpp"
#include "r2f/error.hpp"
#include "r2f/io.hpp"
#include "r2f/pipeline.hpp"

struct r2f_config {
  r2f::RunConfig config;
};

struct r2f_model {
  r2f::ModelCheckpoint checkpoint;
};

namespace {

using namespace r2f;

thread_local std::string g_last_error;

r2f_status status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return R2F_ERR_INVALID_ARGUMENT;
    case ErrorCode::kIo: return R2F_ERR_IO;
    case ErrorCode::kParse: return R2F_ERR_PARSE;
    case ErrorCode::kVersionMismatch: return R2F_ERR_VERSION_MISMATCH;
    case ErrorCode::kCorruptCheckpoint: return R2F_ERR_CORRUPT_CHECKPOINT;
    case ErrorCode::kMissingEmbeddings: return R2F_ERR_MISSING_EMBEDDINGS;
    case ErrorCode::kEmptyDataset: return R2F_ERR_EMPTY_DATASET;
    case ErrorCode::kNonFiniteLoss: return R2F_ERR_NON_FINITE_LOSS;
    default: return R2F_ERR_VALIDATION;
  }
}

r2f_status fail(r2f_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
r2f_status guarded(Fn&& fn) {
  try {
    const r2f_status status = fn();
    if (status == R2F_OK) g_last_error.clear();
    return status;
  } catch (const Error& e) {
    return fail(status_for(e.code()), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(R2F_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(R2F_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(R2F_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must not be NULL");
}

char* duplicate(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

void emit(char** out, const std::string& text) {
  if (out != nullptr) *out = duplicate(text);
}

std::optional<EmbeddingStore> load_embeddings(const char* path, RetrievalMethod method) {
  if (path != nullptr && *path != '\0') return EmbeddingStore::load(path);
  if (method == RetrievalMethod::kEmbeddingCosine) {
    throw Error(ErrorCode::kInvalidArgument, "retrieval method embedding_cosine needs an embedding file");
  }
  return std::nullopt;
}

// Evidence from a file, or computed in memory when no path is given.
std::vector<EvidenceRecord> evidence_for(const std::vector<DocPair>& pairs, const char* path,
                                         const RetrievalConfig& retrieval,
                                         const EmbeddingStore* embeddings,
                                         const AbbreviationSet& abbreviations) {
  if (path != nullptr && *path != '\0') return load_evidence(path);
  return retrieve_pairs(pairs, retrieval, embeddings, abbreviations);
}

}  // namespace

extern "C" {

const char* r2f_version(void) { return "0.1.0"; }

const char* r2f_last_error(void) { return g_last_error.c_str(); }

const char* r2f_status_name(r2f_status status) {
  switch (status) {
    case R2F_OK: return "ok";
    case R2F_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case R2F_ERR_IO: return "io";
    case R2F_ERR_PARSE: return "parse";
    case R2F_ERR_VALIDATION: return "validation";
    case R2F_ERR_VERSION_MISMATCH: return "version_mismatch";
    case R2F_ERR_CORRUPT_CHECKPOINT: return "corrupt_checkpoint";
    case R2F_ERR_MISSING_EMBEDDINGS: return "missing_embeddings";
    case R2F_ERR_EMPTY_DATASET: return "empty_dataset";
    case R2F_ERR_NON_FINITE_LOSS: return "non_finite_loss";
    case R2F_ERR_TOLERANCE: return "tolerance";
    case R2F_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void r2f_string_free(char* text) { std::free(text); }

r2f_status r2f_config_new(r2f_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new r2f_config();
    return R2F_OK;
  });
}

void r2f_config_free(r2f_config* config) { delete config; }

r2f_status r2f_config_load(r2f_config* config, const char* path) {
  return guarded([&] {
    require(config, "config");
    require(path, "path");
    config->config.merge_file(path);
    return R2F_OK;
  });
}

r2f_status r2f_config_set(r2f_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    config->config.set(key, value);
    return R2F_OK;
  });
}

r2f_status r2f_config_set_seed(r2f_config* config, unsigned long long seed) {
  return guarded([&] {
    require(config, "config");
    config->config.set_seed(seed);
    return R2F_OK;
  });
}

r2f_status r2f_config_get(const r2f_config* config, const char* key, char** value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    *value = duplicate(config->config.get(key));
    return R2F_OK;
  });
}

r2f_status r2f_config_dump(const r2f_config* config, char** text) {
  return guarded([&] {
    require(config, "config");
    require(text, "text");
    *text = duplicate(config->config.to_text());
    return R2F_OK;
  });
}

r2f_status r2f_config_validate(const r2f_config* config) {
  return guarded([&] {
    require(config, "config");
    const RunConfig& c = config->config;
    c.retrieval();
    c.model();
    c.train();
    c.synthetic();
    c.gradcheck();
    c.stats_edges();
    c.sweep_ks();
    return R2F_OK;
  });
}

r2f_status r2f_stats(const r2f_config* config, const char* dataset_path, char** report) {
  return guarded([&] {
    require(config, "config");
    require(dataset_path, "dataset_path");
    require(report, "report");
    const auto pairs = load_pairs(dataset_path, config->config.fields());
    *report = duplicate(dataset_stats(pairs, config->config.stats_edges()).to_text());
    return R2F_OK;
  });
}

r2f_status r2f_synth(const r2f_config* config, const char* out_dir) {
  return guarded([&] {
    require(config, "config");
    require(out_dir, "out_dir");
    const SyntheticCorpus corpus = generate_synthetic(config->config.synthetic());
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    const FieldMapping fields = config->config.fields();
    const std::pair<const char*, const SyntheticSplit*> splits[] = {
        {"train", &corpus.train}, {"dev", &corpus.dev}, {"test", &corpus.test}};
    for (const auto& [name, split] : splits) {
      write_file_atomic((dir / (std::string(name) + ".jsonl")).string(),
                        serialize_pairs(split->pairs, fields));
      write_file_atomic((dir / (std::string(name) + ".gold.jsonl")).string(),
                        serialize_annotations(split->gold, fields));
    }
    return R2F_OK;
  });
}

r2f_status r2f_retrieve(const r2f_config* config, const char* dataset_path,
                        const char* embeddings_path, const char* out_path) {
  return guarded([&] {
    require(config, "config");
    require(dataset_path, "dataset_path");
    require(out_path, "out_path");
    const RunConfig& c = config->config;
    const RetrievalConfig retrieval = c.retrieval();
    const auto embeddings = load_embeddings(embeddings_path, retrieval.method);
    const auto pairs = load_pairs(dataset_path, c.fields());
    const auto records =
        retrieve_pairs(pairs, retrieval, embeddings ? &*embeddings : nullptr, c.abbreviations());
    write_file_atomic(out_path, serialize_evidence(records));
    return R2F_OK;
  });
}

r2f_status r2f_train(const r2f_config* config, const char* train_path,
                     const char* train_evidence_path, const char* dev_path,
                     const char* dev_evidence_path, const char* checkpoint_path, r2f_log_fn log,
                     void* user) {
  return guarded([&] {
    require(config, "config");
    require(train_path, "train_path");
    require(dev_path, "dev_path");
    require(checkpoint_path, "checkpoint_path");
    const RunConfig& c = config->config;
    const RetrievalConfig retrieval = c.retrieval();
    const ModelConfig model_config = c.model();
    const TrainConfig train_config = c.train();
    const AbbreviationSet abbreviations = c.abbreviations();
    const bool needs_embeddings = (train_evidence_path == nullptr || dev_evidence_path == nullptr) &&
                                  retrieval.method == RetrievalMethod::kEmbeddingCosine;
    if (needs_embeddings) {
      throw Error(ErrorCode::kInvalidArgument,
                  "embedding retrieval must be materialized with retrieve before training");
    }
    const FieldMapping fields = c.fields();
    const FeatureConfig features{model_config.evidence_slots};
    const auto train_pairs = load_pairs(train_path, fields);
    const auto dev_pairs = load_pairs(dev_path, fields);
    const auto train_samples = prepare_samples(
        train_pairs,
        group_evidence(evidence_for(train_pairs, train_evidence_path, retrieval, nullptr, abbreviations)),
        features, abbreviations);
    const auto dev_samples = prepare_samples(
        dev_pairs,
        group_evidence(evidence_for(dev_pairs, dev_evidence_path, retrieval, nullptr, abbreviations)),
        features, abbreviations);
    const TrainResult result = train(train_samples, dev_samples, model_config, train_config,
                                     [&](const EvalLine& line) {
                                       if (log != nullptr) log(line.to_text().c_str(), user);
                                     });
    ModelCheckpoint ckpt;
    ckpt.model = result.model;
    ckpt.retrieval = retrieval;
    ckpt.threshold = train_config.threshold;
    ckpt.train_digest = train_config.digest();
    ckpt.dev_metrics = {{"dev_macro_f1", result.best_dev.macro_f1},
                        {"dev_micro_f1", result.best_dev.micro_f1},
                        {"best_step", static_cast<double>(result.best_step)},
                        {"total_steps", static_cast<double>(result.total_steps)}};
    save_checkpoint(ckpt, checkpoint_path);
    return R2F_OK;
  });
}

r2f_status r2f_model_load(const char* checkpoint_path, r2f_model** out) {
  return guarded([&] {
    require(checkpoint_path, "checkpoint_path");
    require(out, "out");
    *out = new r2f_model{load_checkpoint(checkpoint_path)};
    return R2F_OK;
  });
}

void r2f_model_free(r2f_model* model) { delete model; }

r2f_status r2f_model_score(const r2f_model* model, const char* hypothesis, const char* premise,
                           double* score, int* entailed) {
  return guarded([&] {
    require(model, "model");
    require(hypothesis, "hypothesis");
    require(premise, "premise");
    const ModelCheckpoint& ckpt = model->checkpoint;
    if (ckpt.retrieval.method == RetrievalMethod::kEmbeddingCosine) {
      throw Error(ErrorCode::kMissingEmbeddings, "single-pair scoring cannot use embedding retrieval");
    }
    const std::vector<DocPair> pairs{{"pair", hypothesis, premise, std::nullopt}};
    const auto samples = prepare_samples(pairs, group_evidence(retrieve_pairs(pairs, ckpt.retrieval)),
                                         ckpt.model.features);
    const SamplePrediction p = predict(ckpt.model, samples.front(), ckpt.threshold);
    if (score != nullptr) *score = p.score;
    if (entailed != nullptr) *entailed = p.label ? 1 : 0;
    return R2F_OK;
  });
}

r2f_status r2f_predict(const r2f_config* config, const char* checkpoint_path,
                       const char* dataset_path, const char* evidence_path,
                       const char* embeddings_path, const char* out_path) {
  return guarded([&] {
    require(config, "config");
    require(checkpoint_path, "checkpoint_path");
    require(dataset_path, "dataset_path");
    require(out_path, "out_path");
    const RunConfig& c = config->config;
    const ModelCheckpoint ckpt = load_checkpoint(checkpoint_path);
    const AbbreviationSet abbreviations = c.abbreviations();
    const auto pairs = load_pairs(dataset_path, c.fields());
    std::optional<EmbeddingStore> embeddings;
    if (evidence_path == nullptr || *evidence_path == '\0') {
      embeddings = load_embeddings(embeddings_path, ckpt.retrieval.method);
    }
    const EvidenceMap evidence = group_evidence(evidence_for(
        pairs, evidence_path, ckpt.retrieval, embeddings ? &*embeddings : nullptr, abbreviations));
    const auto samples = prepare_samples(pairs, evidence, ckpt.model.features, abbreviations);
    const std::string& override_threshold = c.get("predict.threshold");
    const double threshold =
        override_threshold.empty() ? ckpt.threshold : parse_double(override_threshold);
    if (!(threshold > 0.0 && threshold < 1.0)) {
      throw Error(ErrorCode::kValidation, "threshold must lie in (0,1)");
    }
    write_file_atomic(out_path,
                      serialize_predictions(predict_samples(ckpt.model, samples, evidence, threshold)));
    return R2F_OK;
  });
}

r2f_status r2f_eval_doc(const r2f_config* config, const char* predictions_path,
                        const char* dataset_path, char** report, char** table) {
  return guarded([&] {
    require(config, "config");
    require(predictions_path, "predictions_path");
    require(dataset_path, "dataset_path");
    const DocEvalReport r = evaluate_documents(load_predictions(predictions_path),
                                               load_pairs(dataset_path, config->config.fields()));
    emit(report, r.to_text());
    emit(table, r.to_table());
    return R2F_OK;
  });
}

r2f_status r2f_eval_sent(const r2f_config* config, const char* predictions_path,
                         const char* annotations_path, char** report, char** table) {
  return guarded([&] {
    require(config, "config");
    require(predictions_path, "predictions_path");
    require(annotations_path, "annotations_path");
    const auto judgements =
        sentence_judgements(load_predictions(predictions_path),
                            load_annotations(annotations_path, config->config.fields()));
    const SentenceEvalReport r = sentence_eval(judgements);
    emit(report, r.to_text());
    emit(table, r.to_table());
    return R2F_OK;
  });
}

r2f_status r2f_gradcheck(const r2f_config* config, double* max_relative_error, char** report) {
  return guarded([&] {
    require(config, "config");
    const RunConfig& c = config->config;
    const ModelConfig model_config = c.model();
    const double tolerance = c.gradcheck_tolerance();
    const GradCheckResult result = gradient_check(model_config, c.gradcheck());
    if (max_relative_error != nullptr) *max_relative_error = result.max_relative_error;
    std::ostringstream out;
    out << "fusion=" << to_string(model_config.fusion) << '\n'
        << "max_relative_error=" << format_double(result.max_relative_error) << '\n'
        << "worst_tensor=" << result.worst_tensor << '\n'
        << "coordinates=" << result.coordinates << '\n'
        << "tolerance=" << format_double(tolerance) << '\n';
    emit(report, out.str());
    if (!(result.max_relative_error < tolerance)) {
      return fail(R2F_ERR_TOLERANCE, "max relative error " + format_double(result.max_relative_error) +
                                         " exceeds tolerance " + format_double(tolerance));
    }
    return R2F_OK;
  });
}

r2f_status r2f_sweep_k(const r2f_config* config, const char* train_path, const char* dev_path,
                       const char* test_path, const char* test_annotations_path,
                       const char* embeddings_path, const char* out_dir, char** summary) {
  return guarded([&] {
    require(config, "config");
    require(train_path, "train_path");
    require(dev_path, "dev_path");
    require(test_path, "test_path");
    require(out_dir, "out_dir");
    const RunConfig& c = config->config;
    const RetrievalConfig retrieval = c.retrieval();
    const auto embeddings = load_embeddings(embeddings_path, retrieval.method);
    const FieldMapping fields = c.fields();
    const auto train_pairs = load_pairs(train_path, fields);
    const auto dev_pairs = load_pairs(dev_path, fields);
    const auto test_pairs = load_pairs(test_path, fields);
    std::optional<std::vector<AnnotatedSample>> gold;
    if (test_annotations_path != nullptr && *test_annotations_path != '\0') {
      gold = load_annotations(test_annotations_path, fields);
    }
    const AbbreviationSet abbreviations = c.abbreviations();
    ExperimentData data{&train_pairs, &dev_pairs, &test_pairs, gold ? &*gold : nullptr,
                        embeddings ? &*embeddings : nullptr, &abbreviations};
    const auto entries = sweep_k(data, retrieval, c.sweep_ks(), c.model(), c.train());
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    std::ostringstream out;
    for (const auto& e : entries) {
      write_file_atomic((dir / ("k" + std::to_string(e.k) + ".txt")).string(), e.to_text());
      out << "k=" << e.k << " micro_f1=" << format_double(e.doc.micro_f1)
          << " macro_f1=" << format_double(e.doc.macro_f1);
      if (e.sentences) {
        out << " evidence_recall=" << format_double(e.sentences->evidence.recall)
            << " full_accuracy=" << format_double(e.sentences->full_accuracy);
      }
      out << '\n';
    }
    emit(summary, out.str());
    return R2F_OK;
  });
}

r2f_status r2f_rouge1(const char* a, const char* b, double* score) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(score, "score");
    *score = rouge1_score(tokenize(a), tokenize(b));
    return R2F_OK;
  });
}

r2f_status r2f_count_sentences(const char* text, size_t* count) {
  return guarded([&] {
    require(text, "text");
    require(count, "count");
    *count = split_sentences(text).size();
    return R2F_OK;
  });
}

}  // extern "C"
