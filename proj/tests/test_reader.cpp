#include <doctest.h>

#include <cmath>

#include "r2f/error.hpp"
#include "r2f/random.hpp"
#include "r2f/reader.hpp"

using namespace r2f;

namespace {

double feature(const std::vector<double>& f, Feature which) {
  return f[static_cast<std::size_t>(which)];
}

ReaderParams random_params(std::uint64_t seed) {
  Rng rng(seed);
  auto p = ReaderParams::create(ReaderConfig{});
  p.init_uniform(rng, 0.5, true);
  return p;
}

}  // namespace

TEST_CASE("features: self match") {
  const auto f = extract_features({"The dam broke in 1989.", {"The dam broke in 1989."}});
  REQUIRE(f.size() == kFeatureCount);
  CHECK(feature(f, Feature::kUnigramPrecision) == 1.0);
  CHECK(feature(f, Feature::kUnigramRecall) == 1.0);
  CHECK(feature(f, Feature::kUnigramF1) == 1.0);
  CHECK(feature(f, Feature::kBigramF1) == 1.0);
  CHECK(feature(f, Feature::kNumericCoverage) == 1.0);
  CHECK(feature(f, Feature::kCapitalizedCoverage) == 1.0);
  CHECK(feature(f, Feature::kMaxSentenceRouge1) == 1.0);
  CHECK(feature(f, Feature::kEvidenceFraction) == doctest::Approx(0.2));
}

TEST_CASE("features: no shared tokens") {
  const auto f = extract_features({"Cats sleep.", {"Dogs bark loudly."}});
  CHECK(feature(f, Feature::kUnigramPrecision) == 0.0);
  CHECK(feature(f, Feature::kUnigramRecall) == 0.0);
  CHECK(feature(f, Feature::kUnigramF1) == 0.0);
  CHECK(feature(f, Feature::kBigramF1) == 0.0);
  CHECK(feature(f, Feature::kMaxSentenceRouge1) == 0.0);
}

TEST_CASE("features: wrong number reads as uncovered") {
  const auto f = extract_features({"in 1989", {"The river rose in decades past."}});
  CHECK(feature(f, Feature::kNumericCoverage) == 0.0);
  CHECK(feature(f, Feature::kUnigramPrecision) == 0.5);
}

TEST_CASE("features: empty evidence and empty hypothesis") {
  const auto f = extract_features({"Plain words here.", {}});
  CHECK(feature(f, Feature::kUnigramF1) == 0.0);
  CHECK(feature(f, Feature::kEvidenceFraction) == 0.0);
  CHECK(feature(f, Feature::kNumericCoverage) == 1.0);
  CHECK_THROWS_AS(extract_features({"  ", {"x"}}), Error);
}

TEST_CASE("features: evidence order does not matter") {
  const ReaderInput a{"Smith met Jones in Paris in 1990.", {"Smith met Jones.", "They were in Paris in 1990."}};
  const ReaderInput b{a.hypothesis_sentence, {a.evidence_sentences[1], a.evidence_sentences[0]}};
  CHECK(extract_features(a) == extract_features(b));
}

TEST_CASE("encoder: zero weights give a zero vector") {
  const auto p = ReaderParams::create(ReaderConfig{});
  const auto h = encode({"Anything at all.", {"Some evidence."}}, p);
  REQUIRE(h.size() == 32);
  for (double v : h) CHECK(v == 0.0);
  CHECK(credibility(h, p) == 0.5);
}

TEST_CASE("encoder: deterministic") {
  const auto p = random_params(3);
  const ReaderInput in{"Storm hit the coast.", {"A storm hit the coast at dawn."}};
  CHECK(encode(in, p) == encode(in, p));
}

TEST_CASE("encoder: single layer by hand") {
  ReaderConfig cfg;
  cfg.encoder_hidden = {};
  cfg.inference_dim = 3;
  cfg.head_hidden = {};
  auto p = ReaderParams::create(cfg, 3);
  p.encoder.layers()[0].weight = {1, 2, 0, 0, 1, -1, 1, 0, 1};
  const std::vector<double> x{0.1, 0.2, 0.3};
  const auto h = encode_features(x, p);
  CHECK(h[0] == doctest::Approx(std::tanh(0.5)));
  CHECK(h[1] == doctest::Approx(std::tanh(-0.1)));
  CHECK(h[2] == doctest::Approx(std::tanh(0.4)));
}

TEST_CASE("credibility head: sigmoid values") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(40.0) > 0.999999);
  CHECK(sigmoid(-2.0) == doctest::Approx(0.1192).epsilon(1e-3));
  CHECK(std::isfinite(sigmoid(-1000.0)));
  CHECK(sigmoid(-1000.0) >= 0.0);
}

TEST_CASE("score_sentence: substring short-circuit") {
  const auto p = random_params(5);
  const auto s = score_sentence({"Copied sentence.", {}}, true, p);
  CHECK(s.score == 1.0);
  CHECK(s.is_substring);
  CHECK(s.vector == substring_sentinel(32));
  for (double v : s.vector) CHECK(v == 1.0);

  const auto r = score_sentence({"Read sentence.", {"Evidence here."}}, false, p);
  CHECK_FALSE(r.is_substring);
  CHECK(r.score > 0.0);
  CHECK(r.score < 1.0);
}

TEST_CASE("reader params validation") {
  auto p = ReaderParams::create(ReaderConfig{});
  CHECK_NOTHROW(p.validate());
  p.head = Mlp({16, 1}, Activation::kIdentity);
  CHECK_THROWS_AS(p.validate(), Error);
}
