#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "r2f/r2f.h"

namespace fs = std::filesystem;

namespace {

struct Config {
  r2f_config* cfg = nullptr;
  Config() { REQUIRE(r2f_config_new(&cfg) == R2F_OK); }
  ~Config() { r2f_config_free(cfg); }
  void set(const char* k, const char* v) { REQUIRE(r2f_config_set(cfg, k, v) == R2F_OK); }
};

std::string take(char* s) {
  std::string out = s != nullptr ? s : "";
  r2f_string_free(s);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const char* name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("status names and argument checks") {
  CHECK(std::string(r2f_status_name(R2F_OK)) == "ok");
  CHECK(std::string(r2f_version()).size() > 0);
  CHECK(r2f_config_new(nullptr) == R2F_ERR_INVALID_ARGUMENT);
  CHECK(std::string(r2f_last_error()).size() > 0);
  double s = 0;
  CHECK(r2f_rouge1(nullptr, "a", &s) == R2F_ERR_INVALID_ARGUMENT);
}

TEST_CASE("primitives") {
  double s = 0;
  REQUIRE(r2f_rouge1("x y z", "x y w", &s) == R2F_OK);
  CHECK(s == doctest::Approx(2.0 / 3.0));
  size_t n = 0;
  REQUIRE(r2f_count_sentences("He left. She stayed.", &n) == R2F_OK);
  CHECK(n == 2);
  CHECK(r2f_count_sentences("", &n) != R2F_OK);
}

TEST_CASE("config handle") {
  Config c;
  char* v = nullptr;
  REQUIRE(r2f_config_get(c.cfg, "retrieval.k", &v) == R2F_OK);
  CHECK(take(v) == "5");
  CHECK(r2f_config_set(c.cfg, "bogus.key", "1") == R2F_ERR_VALIDATION);
  c.set("retrieval.method", "nope");
  CHECK(r2f_config_validate(c.cfg) == R2F_ERR_VALIDATION);
  c.set("retrieval.method", "bm25");
  CHECK(r2f_config_validate(c.cfg) == R2F_OK);
  REQUIRE(r2f_config_set_seed(c.cfg, 5) == R2F_OK);
  char* dump = nullptr;
  REQUIRE(r2f_config_dump(c.cfg, &dump) == R2F_OK);
  const auto text = take(dump);
  CHECK(text.find("train.seed=5\n") != std::string::npos);
  CHECK(text.find("retrieval.method=bm25\n") != std::string::npos);

  const auto dir = scratch("r2f_capi_cfg");
  std::ofstream(dir / "bad.cfg") << "retrieval.k\n";
  CHECK(r2f_config_load(c.cfg, (dir / "bad.cfg").c_str()) == R2F_ERR_PARSE);
  CHECK(r2f_config_load(c.cfg, (dir / "none.cfg").c_str()) == R2F_ERR_IO);
}

TEST_CASE("synth, retrieve, train, predict, evaluate through files") {
  const auto dir = scratch("r2f_capi_flow");
  Config c;
  c.set("synth.train_size", "120");
  c.set("synth.dev_size", "40");
  c.set("synth.test_size", "40");
  c.set("train.epochs", "2");
  REQUIRE(r2f_synth(c.cfg, dir.c_str()) == R2F_OK);
  for (const char* f : {"train.jsonl", "dev.jsonl", "test.jsonl", "train.gold.jsonl",
                        "dev.gold.jsonl", "test.gold.jsonl"}) {
    CHECK(fs::exists(dir / f));
  }

  char* report = nullptr;
  REQUIRE(r2f_stats(c.cfg, (dir / "train.jsonl").c_str(), &report) == R2F_OK);
  CHECK(take(report).find("total=120\n") != std::string::npos);

  const auto ev = dir / "test.ev.jsonl";
  REQUIRE(r2f_retrieve(c.cfg, (dir / "test.jsonl").c_str(), nullptr, ev.c_str()) == R2F_OK);
  const auto first = slurp(ev);
  REQUIRE(r2f_retrieve(c.cfg, (dir / "test.jsonl").c_str(), nullptr, ev.c_str()) == R2F_OK);
  CHECK(slurp(ev) == first);

  c.set("retrieval.method", "embedding_cosine");
  CHECK(r2f_retrieve(c.cfg, (dir / "test.jsonl").c_str(), nullptr, (dir / "x.jsonl").c_str()) ==
        R2F_ERR_INVALID_ARGUMENT);
  CHECK_FALSE(fs::exists(dir / "x.jsonl"));
  c.set("retrieval.method", "rouge1");

  int lines = 0;
  const auto ckpt = dir / "model.ckpt";
  REQUIRE(r2f_train(c.cfg, (dir / "train.jsonl").c_str(), nullptr, (dir / "dev.jsonl").c_str(),
                    nullptr, ckpt.c_str(),
                    [](const char* line, void* user) {
                      CHECK(std::string(line).rfind("step=", 0) == 0);
                      ++*static_cast<int*>(user);
                    },
                    &lines) == R2F_OK);
  CHECK(lines == 2);

  r2f_model* model = nullptr;
  REQUIRE(r2f_model_load(ckpt.c_str(), &model) == R2F_OK);
  double score = -1;
  int entailed = -1;
  REQUIRE(r2f_model_score(model, "The dam broke.", "The dam broke. It rained.", &score, &entailed) ==
          R2F_OK);
  CHECK(score == 1.0);
  CHECK(entailed == 1);
  r2f_model_free(model);

  const auto preds = dir / "pred.jsonl";
  REQUIRE(r2f_predict(c.cfg, ckpt.c_str(), (dir / "test.jsonl").c_str(), ev.c_str(), nullptr,
                      preds.c_str()) == R2F_OK);
  CHECK(slurp(preds).find("\"argmin_index\":") != std::string::npos);

  char* table = nullptr;
  REQUIRE(r2f_eval_doc(c.cfg, preds.c_str(), (dir / "test.jsonl").c_str(), &report, &table) == R2F_OK);
  CHECK(take(report).find("macro_f1=") != std::string::npos);
  CHECK(take(table).find('\t') != std::string::npos);
  REQUIRE(r2f_eval_sent(c.cfg, preds.c_str(), (dir / "test.gold.jsonl").c_str(), &report, nullptr) ==
          R2F_OK);
  CHECK(take(report).find("full_accuracy=") != std::string::npos);
}

TEST_CASE("checkpoint failures map to distinct statuses") {
  const auto dir = scratch("r2f_capi_ckpt");
  r2f_model* model = nullptr;
  CHECK(r2f_model_load((dir / "missing").c_str(), &model) == R2F_ERR_IO);
  std::ofstream(dir / "bad.ckpt") << "r2f-checkpoint 1\nfusion score";
  CHECK(r2f_model_load((dir / "bad.ckpt").c_str(), &model) == R2F_ERR_CORRUPT_CHECKPOINT);
  std::ofstream(dir / "old.ckpt") << "r2f-checkpoint 0\n";
  CHECK(r2f_model_load((dir / "old.ckpt").c_str(), &model) == R2F_ERR_VERSION_MISMATCH);
  CHECK(model == nullptr);
}

TEST_CASE("gradcheck reports tolerance failures") {
  Config c;
  c.set("gradcheck.samples", "3");
  double err = -1;
  char* report = nullptr;
  REQUIRE(r2f_gradcheck(c.cfg, &err, &report) == R2F_OK);
  CHECK(err < 1e-4);
  CHECK(take(report).find("max_relative_error=") != std::string::npos);
  c.set("gradcheck.tolerance", "1e-30");
  CHECK(r2f_gradcheck(c.cfg, &err, &report) == R2F_ERR_TOLERANCE);
  take(report);
}
