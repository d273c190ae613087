#include <doctest.h>

#include "r2f/error.hpp"
#include "r2f/metrics.hpp"
#include "r2f/random.hpp"

using namespace r2f;

TEST_CASE("prf") {
  const auto a = prf(1, 0, 0);
  CHECK(a.precision == 1.0);
  CHECK(a.recall == 1.0);
  CHECK(a.f1 == 1.0);
  const auto z = prf(0, 3, 2);
  CHECK(z.precision == 0.0);
  CHECK(z.recall == 0.0);
  CHECK(z.f1 == 0.0);
  const auto b = prf(2, 1, 2);
  CHECK(b.precision == doctest::Approx(2.0 / 3.0));
  CHECK(b.recall == 0.5);
  CHECK(b.f1 == doctest::Approx(4.0 / 7.0));
}

TEST_CASE("doc_eval: perfect predictions") {
  const std::vector<bool> gold{true, false, true, false};
  const auto r = doc_eval(gold, gold);
  CHECK(r.micro_f1 == 1.0);
  CHECK(r.macro_f1 == 1.0);
  CHECK(r.accuracy == 1.0);
  CHECK(r.entailment.f1 == 1.0);
  CHECK(r.not_entailment.f1 == 1.0);
}

TEST_CASE("doc_eval: majority guess on a 90/10 split") {
  std::vector<bool> gold(100, false);
  for (int i = 0; i < 10; ++i) gold[i] = true;
  const std::vector<bool> pred(100, false);
  const auto r = doc_eval(pred, gold);
  CHECK(r.micro_f1 == doctest::Approx(0.9));
  // not-entailment F1 = 180/190, entailment F1 = 0
  CHECK(r.macro_f1 == doctest::Approx(180.0 / 190.0 / 2.0));
  CHECK(r.macro_f1 < 0.5);
}

TEST_CASE("doc_eval: one class never predicted") {
  const std::vector<bool> gold{true, true, false, false};
  const std::vector<bool> pred{true, true, true, true};
  const auto r = doc_eval(pred, gold);
  CHECK(r.not_entailment.f1 == 0.0);
  CHECK(r.macro_f1 == doctest::Approx(r.entailment.f1 / 2.0));
  CHECK(r.entailment.f1 == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(doc_eval({true}, {true, false}), Error);
}

TEST_CASE("micro F1 equals accuracy exactly") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    ConfusionCounts c{rng.index(50), rng.index(50), rng.index(50), rng.index(50)};
    const auto r = doc_eval_from_counts(c);
    CHECK(r.micro_f1 == r.accuracy);
  }
}

TEST_CASE("evidence_eval") {
  const std::vector<std::vector<std::size_t>> groups{{2}, {4, 5}};
  const std::vector<std::size_t> sup{1, 2, 3};
  auto o = evidence_eval(sup, groups);
  CHECK(o.hit);
  CHECK(o.precision == doctest::Approx(1.0 / 3.0));

  const std::vector<std::vector<std::size_t>> two{{0, 1}, {2, 3}};
  const std::vector<std::size_t> half{0, 2};
  o = evidence_eval(half, two);
  CHECK_FALSE(o.hit);
  CHECK(o.precision == 1.0);
}

TEST_CASE("sentence_eval: substring sentences skip evidence metrics") {
  std::vector<SentenceJudgement> j(3);
  j[0] = {{0, 1}, false, true, true, {{1}}};
  j[1] = {{}, true, true, true, {{4}}};
  j[2] = {{2, 3}, false, false, true, {{5}}};
  const auto r = sentence_eval(j);
  CHECK(r.sentences == 3);
  CHECK(r.evidence_sentences == 2);
  CHECK(r.evidence.recall == 0.5);
  CHECK(r.evidence.precision == doctest::Approx(0.25));
  CHECK(r.evidence_recall_waived == doctest::Approx(2.0 / 3.0));
  CHECK(r.labels.accuracy == doctest::Approx(2.0 / 3.0));
  // sentence 0 hit+correct, sentence 1 waived+correct, sentence 2 miss
  CHECK(r.full_accuracy == doctest::Approx(2.0 / 3.0));
  CHECK(r.full_accuracy <= r.evidence_recall_waived);
  CHECK(r.full_accuracy <= r.labels.accuracy);
}

TEST_CASE("full_accuracy") {
  CHECK(full_accuracy({true, true}, {true, false}, {true, false}) == 1.0);
  CHECK(full_accuracy({true}, {false}, {true}) == 0.0);
  CHECK(full_accuracy({false}, {true}, {true}) == 0.0);
}

TEST_CASE("reports render fixed field names") {
  const auto r = doc_eval({true, false}, {true, true});
  const auto text = r.to_text();
  CHECK(text.find("macro_f1=") != std::string::npos);
  CHECK(text.find("tp=1\n") != std::string::npos);
  const auto table = r.to_table();
  CHECK(table.rfind("entailment_precision\t", 0) == 0);
}
