#include <doctest.h>

#include <filesystem>
#include <numeric>

#include "r2f/corpus.hpp"
#include "r2f/error.hpp"
#include "r2f/io.hpp"
#include "r2f/retrieval.hpp"

using namespace r2f;

namespace {

const char* kThree =
    R"({"id":"a","hypothesis":"H one.","premise":"P one.","label":"entailment"}
{"id":"b","hypothesis":"H two.","premise":"P two.","label":"not_entailment"}

{"id":"c","hypothesis":"H three.","premise":"P three.","label":"Not Entailment"}
)";

SyntheticConfig small(double corruption) {
  SyntheticConfig c;
  c.train_size = 40;
  c.dev_size = 10;
  c.test_size = 10;
  c.corruption_rate = corruption;
  return c;
}

}  // namespace

TEST_CASE("parse_pairs: well-formed file") {
  const auto pairs = parse_pairs(kThree);
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0].label == Label::kEntailment);
  CHECK(pairs[2].label == Label::kNotEntailment);
  CHECK(pairs[1].premise == "P two.");
}

TEST_CASE("parse_pairs: errors carry the line number") {
  try {
    parse_pairs("{\"id\":\"a\",\"hypothesis\":\"h\",\"premise\":\"p\"}\n{\"id\":\"b\",\"hypothesis\":\"h\"}\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_pairs("not json\n"), ParseError);
  try {
    parse_pairs("{\"id\":\"a\",\"hypothesis\":\"h\",\"premise\":\"p\"}\n"
                "{\"id\":\"a\",\"hypothesis\":\"h\",\"premise\":\"p\"}\n");
    FAIL("expected a duplicate id");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDuplicateId);
  }
  try {
    parse_pairs("{\"id\":\"a\",\"hypothesis\":\"\",\"premise\":\"p\"}\n");
    FAIL("expected an empty field");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyField);
  }
  CHECK_THROWS_AS(parse_pairs("{\"id\":\"a\",\"hypothesis\":\"h\",\"premise\":\"p\",\"label\":\"maybe\"}\n"),
                  ParseError);
}

TEST_CASE("parse_pairs: unlabeled records and custom field names") {
  const auto p = parse_pairs("{\"id\":\"a\",\"hypothesis\":\"h\",\"premise\":\"p\"}\n");
  CHECK_FALSE(p[0].label.has_value());
  FieldMapping f{"uid", "hyp", "prem", "gold"};
  const auto q = parse_pairs("{\"uid\":\"x\",\"hyp\":\"h\",\"prem\":\"p\",\"gold\":\"entailment\"}\n", f);
  CHECK(q[0].id == "x");
  CHECK(parse_pairs(serialize_pairs(q, f), f) == q);
}

TEST_CASE("save then load is identity") {
  const auto pairs = parse_pairs(kThree);
  const auto path = (std::filesystem::temp_directory_path() / "r2f_pairs_test.jsonl").string();
  save_pairs(pairs, path);
  CHECK(load_pairs(path) == pairs);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_pairs(path), Error);
}

TEST_CASE("labels") {
  CHECK(parse_label("ENTAILMENT") == Label::kEntailment);
  CHECK(parse_label("not entailment") == Label::kNotEntailment);
  CHECK(to_string(Label::kNotEntailment) == "not_entailment");
  CHECK_THROWS_AS(parse_label("neutral"), Error);
}

TEST_CASE("annotation invariants") {
  AnnotatedSample s;
  s.pair = {"a", "H.", "P.", Label::kEntailment};
  s.hypothesis_sentences = {{"H.", Label::kEntailment, {{0}}}};
  CHECK_NOTHROW(s.validate(1));
  CHECK_THROWS_AS(s.validate(0), Error);
  s.hypothesis_sentences[0].evidence_groups.clear();
  CHECK_THROWS_AS(s.validate(1), Error);
  s.hypothesis_sentences = {{"H.", Label::kNotEntailment, {}}};
  CHECK_THROWS_AS(s.validate(1), Error);
  s.pair.label = Label::kNotEntailment;
  CHECK_NOTHROW(s.validate(1));
}

TEST_CASE("dataset stats") {
  std::vector<DocPair> pairs;
  for (int i = 0; i < 10; ++i) {
    pairs.push_back({"p" + std::to_string(i), "one two three four five.", "six seven eight nine ten.",
                     i < 5 ? Label::kEntailment : Label::kNotEntailment});
  }
  const auto s = dataset_stats(pairs);
  CHECK(s.entailment == 5);
  CHECK(s.not_entailment == 5);
  CHECK(s.histogram[0] == 10);
  CHECK(s.bucket_names()[0] == "<150");
  CHECK(pair_word_count(pairs[0]) == 10);
  CHECK(s.mean_words == 10.0);

  const auto corpus = generate_synthetic_split(small(0.5), 1000, "s", 1);
  const auto big = dataset_stats(corpus.pairs);
  CHECK(std::accumulate(big.histogram.begin(), big.histogram.end(), std::size_t{0}) == 1000);
  CHECK(big.total == 1000);
}

TEST_CASE("synthetic: corruption rate extremes") {
  const auto clean = generate_synthetic(small(0.0));
  for (const auto& p : clean.train.pairs) CHECK(p.label == Label::kEntailment);
  const auto dirty = generate_synthetic(small(1.0));
  for (const auto& p : dirty.test.pairs) CHECK(p.label == Label::kNotEntailment);
}

TEST_CASE("synthetic: deterministic and gold-consistent") {
  const auto a = generate_synthetic(small(0.5));
  const auto b = generate_synthetic(small(0.5));
  CHECK(serialize_pairs(a.train.pairs) == serialize_pairs(b.train.pairs));
  CHECK(serialize_annotations(a.dev.gold) == serialize_annotations(b.dev.gold));
  auto other = small(0.5);
  other.seed = 7;
  CHECK(serialize_pairs(generate_synthetic(other).train.pairs) != serialize_pairs(a.train.pairs));

  REQUIRE(a.train.pairs.size() == 40);
  REQUIRE(a.dev.gold.size() == 10);
  for (const auto& g : a.train.gold) {
    const auto premise = split_sentences(g.pair.premise);
    CHECK_NOTHROW(g.validate(premise.size()));
    CHECK(split_sentences(g.pair.hypothesis).size() == g.hypothesis_sentences.size());
  }
  // round trip through the annotation format
  CHECK(parse_annotations(serialize_annotations(a.test.gold)) == a.test.gold);
}

TEST_CASE("synthetic: ROUGE top-2 finds a gold group for every read sentence") {
  const auto split = generate_synthetic_split(small(0.5), 100, "r", 3);
  RetrievalConfig cfg;
  cfg.k = 2;
  for (const auto& g : split.gold) {
    const PremiseIndex premise(g.pair.id, g.pair.premise, split_sentences(g.pair.premise));
    for (std::size_t i = 0; i < g.hypothesis_sentences.size(); ++i) {
      const auto& hs = g.hypothesis_sentences[i];
      const auto sel = select_evidence({g.pair.id, i, hs.text}, premise, cfg);
      if (sel.is_substring || hs.evidence_groups.empty()) continue;
      bool hit = false;
      for (const auto& group : hs.evidence_groups) {
        bool all = true;
        for (auto idx : group) {
          all = all && std::find(sel.evidence_indices.begin(), sel.evidence_indices.end(), idx) !=
                           sel.evidence_indices.end();
        }
        hit = hit || all;
      }
      CHECK(hit);
    }
  }
}

TEST_CASE("synthetic config validation") {
  auto c = small(0.5);
  c.corruption_rate = 1.5;
  CHECK_THROWS_AS(c.validate(), Error);
  c = small(0.5);
  c.min_premise_sentences = 50;
  CHECK_THROWS_AS(c.validate(), Error);
}
