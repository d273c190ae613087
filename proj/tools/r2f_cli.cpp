// r2f command-line driver. Talks to the engine only through the C API.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "r2f/r2f.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;

int exit_code(r2f_status status) {
  switch (status) {
    case R2F_OK: return kExitOk;
    case R2F_ERR_INVALID_ARGUMENT: return kExitUsage;
    case R2F_ERR_VALIDATION:
    case R2F_ERR_TOLERANCE: return kExitValidation;
    default: return kExitRuntime;
  }
}

// Owns a string handed out by the library.
struct LibString {
  char* text = nullptr;
  ~LibString() { r2f_string_free(text); }
  std::string str() const { return text != nullptr ? text : ""; }
};

struct Failure {
  r2f_status status;
};

void check(r2f_status status) {
  if (status != R2F_OK) throw Failure{status};
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) {
      std::filesystem::remove(tmp);
      throw std::runtime_error("cannot write " + path);
    }
  }
  std::filesystem::rename(tmp, path);
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

// Flags shared by every subcommand; anything set here overrides the file.
struct Common {
  std::string config_path;
  std::optional<unsigned long long> seed;
  std::vector<std::string> overrides;
  std::string method;
  std::optional<std::size_t> k;
  std::string fusion;
  std::optional<double> threshold;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "key=value config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "seed for retrieval, training, generation and gradcheck");
  cmd->add_option("--set", c.overrides, "override one config key (key=value); repeatable");
}

void add_retrieval(CLI::App* cmd, Common& c) {
  cmd->add_option("--method", c.method, "rouge1 | bm25 | embedding_cosine | random");
  cmd->add_option("--K", c.k, "evidence sentences per hypothesis sentence");
}

void add_model(CLI::App* cmd, Common& c) {
  cmd->add_option("--fusion", c.fusion, "score_min | vector_min | kernel");
  cmd->add_option("--threshold", c.threshold, "entailment threshold");
}

r2f_config* build_config(const Common& c) {
  r2f_config* cfg = nullptr;
  check(r2f_config_new(&cfg));
  try {
    if (!c.config_path.empty()) check(r2f_config_load(cfg, c.config_path.c_str()));
    for (const auto& item : c.overrides) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        std::cerr << "error: --set expects key=value, got '" << item << "'\n";
        throw Failure{R2F_ERR_INVALID_ARGUMENT};
      }
      const std::string key = item.substr(0, eq);
      check(r2f_config_set(cfg, key.c_str(), item.substr(eq + 1).c_str()));
    }
    if (c.seed) check(r2f_config_set_seed(cfg, *c.seed));
    if (!c.method.empty()) check(r2f_config_set(cfg, "retrieval.method", c.method.c_str()));
    if (c.k) check(r2f_config_set(cfg, "retrieval.k", std::to_string(*c.k).c_str()));
    if (!c.fusion.empty()) check(r2f_config_set(cfg, "fusion.method", c.fusion.c_str()));
    if (c.threshold) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", *c.threshold);
      check(r2f_config_set(cfg, "train.threshold", buf));
      check(r2f_config_set(cfg, "predict.threshold", buf));
    }
    check(r2f_config_validate(cfg));
  } catch (...) {
    r2f_config_free(cfg);
    throw;
  }
  return cfg;
}

struct ConfigHandle {
  r2f_config* cfg;
  explicit ConfigHandle(const Common& c) : cfg(build_config(c)) {}
  ~ConfigHandle() { r2f_config_free(cfg); }
  ConfigHandle(const ConfigHandle&) = delete;
  ConfigHandle& operator=(const ConfigHandle&) = delete;
};

std::string config_value(const ConfigHandle& h, const char* key) {
  LibString v;
  check(r2f_config_get(h.cfg, key, &v.text));
  return v.str();
}

void emit_report(const std::string& report, const std::string& table, const std::string& out) {
  std::cout << report;
  if (!out.empty()) write_atomic(out, table);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"r2f: retrieval, reading and fusion for document-level NLI"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(r2f_version()));

  Common common;
  std::string dataset, dev, test, annotations, embeddings, out, checkpoint, evidence, dev_evidence,
      predictions, log_path;

  auto* stats = app.add_subcommand("stats", "label counts and length histogram of a dataset");
  add_common(stats, common);
  stats->add_option("--dataset", dataset, "dataset (JSON lines)")->required();

  auto* synth = app.add_subcommand("synth", "generate synthetic train/dev/test splits with gold");
  add_common(synth, common);
  synth->add_option("--out", out, "output directory")->required();

  auto* retrieve = app.add_subcommand("retrieve", "materialize evidence for every hypothesis sentence");
  add_common(retrieve, common);
  add_retrieval(retrieve, common);
  retrieve->add_option("--dataset", dataset, "dataset (JSON lines)")->required();
  retrieve->add_option("--embeddings", embeddings, "sentence embedding TSV");
  retrieve->add_option("--out", out, "evidence file to write")->required();

  auto* train = app.add_subcommand("train", "train reader and fusion head from document labels");
  add_common(train, common);
  add_retrieval(train, common);
  add_model(train, common);
  train->add_option("--dataset", dataset, "training pairs")->required();
  train->add_option("--evidence", evidence, "evidence file for the training pairs");
  train->add_option("--dev", dev, "development pairs")->required();
  train->add_option("--dev-evidence", dev_evidence, "evidence file for the development pairs");
  train->add_option("--out,--checkpoint", checkpoint, "checkpoint to write")->required();
  train->add_option("--log", log_path, "training log (default: <checkpoint>.log)");

  auto* predict = app.add_subcommand("predict", "document and sentence predictions");
  add_common(predict, common);
  add_model(predict, common);
  predict->add_option("--checkpoint", checkpoint, "trained checkpoint")->required();
  predict->add_option("--dataset", dataset, "pairs to label")->required();
  predict->add_option("--evidence", evidence, "evidence file (default: retrieve now)");
  predict->add_option("--embeddings", embeddings, "sentence embedding TSV");
  predict->add_option("--out", out, "prediction file to write")->required();

  auto* eval_doc = app.add_subcommand("eval-doc", "document-level precision/recall/F1");
  add_common(eval_doc, common);
  eval_doc->add_option("--predictions", predictions, "prediction file")->required();
  eval_doc->add_option("--dataset", dataset, "gold pairs")->required();
  eval_doc->add_option("--out", out, "table file to write");

  auto* eval_sent = app.add_subcommand("eval-sent", "evidence and sentence-label metrics");
  add_common(eval_sent, common);
  eval_sent->add_option("--predictions", predictions, "prediction file")->required();
  eval_sent->add_option("--annotations", annotations, "annotated pairs")->required();
  eval_sent->add_option("--out", out, "table file to write");

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of the analytic gradients");
  add_common(gradcheck, common);
  add_model(gradcheck, common);

  auto* sweep = app.add_subcommand("sweep-k", "retrieve/train/evaluate once per K");
  add_common(sweep, common);
  add_retrieval(sweep, common);
  add_model(sweep, common);
  std::string ks;
  sweep->add_option("--dataset", dataset, "training pairs")->required();
  sweep->add_option("--dev", dev, "development pairs")->required();
  sweep->add_option("--test", test, "test pairs")->required();
  sweep->add_option("--annotations", annotations, "annotated test pairs");
  sweep->add_option("--embeddings", embeddings, "sentence embedding TSV");
  sweep->add_option("--ks", ks, "comma-separated K values (default 3,4,5,6,7)");
  sweep->add_option("--out", out, "report directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!ks.empty()) common.overrides.push_back("sweep.ks=" + ks);
    ConfigHandle cfg(common);
    const auto needs_embeddings = [&]() {
      return config_value(cfg, "retrieval.method") == "embedding_cosine" && embeddings.empty();
    };

    if (*stats) {
      LibString report;
      check(r2f_stats(cfg.cfg, dataset.c_str(), &report.text));
      std::cout << report.str();
    } else if (*synth) {
      check(r2f_synth(cfg.cfg, out.c_str()));
      std::cout << "wrote " << out << "/{train,dev,test}.jsonl and .gold.jsonl\n";
    } else if (*retrieve) {
      if (needs_embeddings()) {
        std::cerr << "error: --method embedding_cosine requires --embeddings\n";
        return kExitUsage;
      }
      check(r2f_retrieve(cfg.cfg, dataset.c_str(), opt(embeddings), out.c_str()));
    } else if (*train) {
      if (needs_embeddings() && (evidence.empty() || dev_evidence.empty())) {
        std::cerr << "error: embedding_cosine training needs --evidence and --dev-evidence\n";
        return kExitUsage;
      }
      if (log_path.empty()) log_path = checkpoint + ".log";
      LibString resolved;
      check(r2f_config_dump(cfg.cfg, &resolved.text));
      std::string log = resolved.str();
      std::cerr << resolved.str();
      struct Sink {
        std::string* log;
      } sink{&log};
      const auto on_line = [](const char* line, void* user) {
        std::cerr << line << '\n';
        *static_cast<Sink*>(user)->log += std::string(line) + '\n';
      };
      const r2f_status status =
          r2f_train(cfg.cfg, dataset.c_str(), opt(evidence), dev.c_str(), opt(dev_evidence),
                    checkpoint.c_str(), on_line, &sink);
      write_atomic(log_path, log);
      check(status);
    } else if (*predict) {
      check(r2f_predict(cfg.cfg, checkpoint.c_str(), dataset.c_str(), opt(evidence),
                        opt(embeddings), out.c_str()));
    } else if (*eval_doc) {
      LibString report, table;
      check(r2f_eval_doc(cfg.cfg, predictions.c_str(), dataset.c_str(), &report.text, &table.text));
      emit_report(report.str(), table.str(), out);
    } else if (*eval_sent) {
      LibString report, table;
      check(r2f_eval_sent(cfg.cfg, predictions.c_str(), annotations.c_str(), &report.text,
                          &table.text));
      emit_report(report.str(), table.str(), out);
    } else if (*gradcheck) {
      LibString report;
      double worst = 0.0;
      const r2f_status status = r2f_gradcheck(cfg.cfg, &worst, &report.text);
      std::cout << report.str();
      check(status);
    } else if (*sweep) {
      if (needs_embeddings()) {
        std::cerr << "error: --method embedding_cosine requires --embeddings\n";
        return kExitUsage;
      }
      LibString summary;
      check(r2f_sweep_k(cfg.cfg, dataset.c_str(), dev.c_str(), test.c_str(), opt(annotations),
                        opt(embeddings), out.c_str(), &summary.text));
      std::cout << summary.str();
    }
  } catch (const Failure& f) {
    std::cerr << "error (" << r2f_status_name(f.status) << "): " << r2f_last_error() << '\n';
    return exit_code(f.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
