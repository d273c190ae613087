#include <doctest.h>

#include <filesystem>

#include "r2f/checkpoint.hpp"
#include "r2f/error.hpp"
#include "r2f/io.hpp"
#include "r2f/random.hpp"
#include "r2f/training.hpp"

using namespace r2f;

namespace {

ModelCheckpoint sample_checkpoint(FusionMethod fusion) {
  ModelConfig mc;
  mc.fusion = fusion;
  mc.random_kernel_means = true;
  Rng rng(17);
  ModelCheckpoint ck;
  ck.model = Model::create(mc, rng);
  // biases too, so every tensor carries non-trivial values
  for (auto& t : ck.model.tensors()) {
    for (double& v : *t.values) v = rng.uniform(-1.0, 1.0) / 3.0;
  }
  ck.retrieval.method = RetrievalMethod::kBm25;
  ck.retrieval.k = 4;
  ck.threshold = 0.45;
  ck.train_digest = TrainConfig{}.digest();
  ck.dev_metrics = {{"dev_macro_f1", 0.875}, {"best_step", 12}};
  return ck;
}

ErrorCode code_of(const std::string& content) {
  try {
    parse_checkpoint(content);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("checkpoint round trip is bit-identical") {
  for (auto fusion : {FusionMethod::kScoreMin, FusionMethod::kVectorMin, FusionMethod::kKernel}) {
    auto ck = sample_checkpoint(fusion);
    const auto path = (std::filesystem::temp_directory_path() / "r2f_ck_test.txt").string();
    save_checkpoint(ck, path);
    auto back = load_checkpoint(path);
    std::filesystem::remove(path);
    auto a = ck.model.tensors();
    auto b = back.model.tensors();
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].name == b[k].name);
      CHECK(*a[k].values == *b[k].values);
    }
    CHECK(back.model.fusion == fusion);
    CHECK(back.model.bank.means == ck.model.bank.means);
    CHECK(back.retrieval == ck.retrieval);
    CHECK(back.threshold == 0.45);
    CHECK(back.train_digest == ck.train_digest);
    CHECK(back.dev_metrics == ck.dev_metrics);
    CHECK(serialize_checkpoint(back) == serialize_checkpoint(ck));
  }
}

TEST_CASE("truncated or tampered checkpoints are corrupt") {
  const auto text = serialize_checkpoint(sample_checkpoint(FusionMethod::kKernel));
  CHECK(code_of(text.substr(0, text.size() / 2)) == ErrorCode::kCorruptCheckpoint);
  CHECK(code_of(text.substr(0, text.size() - 3)) == ErrorCode::kCorruptCheckpoint);
  CHECK(code_of("") == ErrorCode::kCorruptCheckpoint);

  std::string tampered = text;
  const auto pos = tampered.find("threshold 0.45");
  REQUIRE(pos != std::string::npos);
  tampered.replace(pos, 14, "threshold 0.55");
  CHECK(code_of(tampered) == ErrorCode::kCorruptCheckpoint);
}

TEST_CASE("another format version is rejected by name") {
  std::string text = serialize_checkpoint(sample_checkpoint(FusionMethod::kScoreMin));
  REQUIRE(text.rfind("r2f-checkpoint 1\n", 0) == 0);
  text.replace(0, 16, "r2f-checkpoint 0");
  try {
    parse_checkpoint(text);
    FAIL("expected a version error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kVersionMismatch);
    const std::string msg = e.what();
    CHECK(msg.find('0') != std::string::npos);
    CHECK(msg.find('1') != std::string::npos);
  }
}

TEST_CASE("missing checkpoint file is an io error") {
  try {
    load_checkpoint("/nonexistent/r2f.ckpt");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
}
