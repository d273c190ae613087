#include <doctest.h>

#include <cmath>

#include "r2f/error.hpp"
#include "r2f/random.hpp"
#include "r2f/training.hpp"

using namespace r2f;

namespace {

PreparedSample random_sample(Rng& rng, std::size_t sentences, bool label, double substring_rate) {
  PreparedSample s;
  s.id = "s" + std::to_string(rng.next() % 100000);
  s.label = label;
  for (std::size_t i = 0; i < sentences; ++i) {
    PreparedSentence ps;
    ps.is_substring = rng.bernoulli(substring_rate);
    if (!ps.is_substring) {
      for (std::size_t f = 0; f < kFeatureCount; ++f) ps.features.push_back(rng.uniform());
    }
    s.sentences.push_back(std::move(ps));
  }
  return s;
}

std::vector<PreparedSample> separable_set(std::size_t n, std::uint64_t seed) {
  // entailed iff every sentence has feature 0 above 0.5
  Rng rng(seed);
  std::vector<PreparedSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool label = i % 2 == 0;
    auto s = random_sample(rng, 3, label, 0.0);
    for (auto& ps : s.sentences) ps.features[0] = 0.6 + 0.4 * rng.uniform();
    if (!label) s.sentences[rng.index(3)].features[0] = 0.4 * rng.uniform();
    s.id = "x" + std::to_string(i);
    out.push_back(std::move(s));
  }
  return out;
}

Model make_model(FusionMethod fusion, std::uint64_t seed) {
  ModelConfig cfg;
  cfg.fusion = fusion;
  Rng rng(seed);
  return Model::create(cfg, rng);
}

bool all_zero(GradientTape& tape) {
  for (const auto& t : tape.tensors()) {
    for (double v : *t.values) {
      if (v != 0.0) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("bce loss values") {
  CHECK(bce_loss(0.5, true) == doctest::Approx(std::log(2.0)));
  CHECK(bce_loss(0.5, false) == doctest::Approx(0.6931).epsilon(1e-4));
  CHECK(bce_loss(1.0 - 1e-12, true) < 1e-6);
  CHECK(bce_loss(0.2, true) == doctest::Approx(1.6094).epsilon(1e-4));
  CHECK(std::isfinite(bce_loss(0.0, true)));
  CHECK(bce_grad(0.2, true) == doctest::Approx(-5.0));
  CHECK(bce_grad(0.2, false) == doctest::Approx(1.25));
  CHECK(bce_grad(1.0, true) == 0.0);
  CHECK(bce_grad(0.0, false) == 0.0);
}

TEST_CASE("score_min routes gradient only through the argmin sentence") {
  auto model = make_model(FusionMethod::kScoreMin, 1);
  Rng rng(2);
  const auto sample = random_sample(rng, 4, true, 0.0);
  const auto pass = forward(model, sample);
  REQUIRE(pass.fusion.argmin_index.has_value());

  // only the argmin sentence present: identical gradient
  PreparedSample lone = sample;
  lone.sentences = {sample.sentences[*pass.fusion.argmin_index]};
  GradientTape full(model), single(model);
  backward(model, pass, 1.0, full);
  backward(model, forward(model, lone), 1.0, single);
  auto a = full.tensors();
  auto b = single.tensors();
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(*a[k].values == *b[k].values);
  CHECK_FALSE(all_zero(full));
}

TEST_CASE("all-substring samples have zero gradient and score 1") {
  for (auto fusion : {FusionMethod::kScoreMin, FusionMethod::kVectorMin, FusionMethod::kKernel}) {
    auto model = make_model(fusion, 3);
    Rng rng(4);
    const auto sample = random_sample(rng, 3, true, 1.0);
    const auto pass = forward(model, sample);
    if (fusion == FusionMethod::kScoreMin) CHECK(pass.fusion.sample_score == 1.0);
    for (double s : pass.sentence_scores) CHECK(s == 1.0);
    GradientTape tape(model);
    backward(model, pass, 0.7, tape);
    if (fusion == FusionMethod::kScoreMin) {
      CHECK(all_zero(tape));
    } else {
      // the fusion head still sees the constant pooled input; the reader
      // encoder gets nothing
      for (const auto& t : tape.tensors()) {
        if (t.name.rfind("reader.encoder", 0) == 0) {
          for (double v : *t.values) CHECK(v == 0.0);
        }
      }
    }
  }
}

TEST_CASE("gradient check on a handful of samples per head") {
  for (auto fusion : {FusionMethod::kScoreMin, FusionMethod::kVectorMin, FusionMethod::kKernel}) {
    ModelConfig mc;
    mc.fusion = fusion;
    GradCheckConfig gc;
    gc.samples = 8;
    const auto r = gradient_check(mc, gc);
    CAPTURE(to_string(fusion));
    CAPTURE(r.worst_tensor);
    CHECK(r.max_relative_error < 1e-4);
    CHECK(r.coordinates > 0);
  }
}

TEST_CASE("adamw: zero gradient and zero decay leave parameters alone") {
  std::vector<double> p{0.3, -0.2}, g{0.0, 0.0};
  TrainConfig cfg;
  cfg.weight_decay = 0.0;
  AdamState state;
  adamw_step({{"w", &p, true}}, {{"w", &g, true}}, state, cfg);
  CHECK(p == std::vector<double>{0.3, -0.2});
}

TEST_CASE("adamw: first step moves against the gradient by about lr") {
  std::vector<double> p{0.0, 0.0}, g{2.0, -0.5};
  TrainConfig cfg;
  cfg.weight_decay = 0.0;
  AdamState state;
  adamw_step({{"w", &p, true}}, {{"w", &g, true}}, state, cfg);
  CHECK(p[0] == doctest::Approx(-cfg.learning_rate).epsilon(1e-6));
  CHECK(p[1] == doctest::Approx(cfg.learning_rate).epsilon(1e-6));
}

TEST_CASE("adamw: two hand-fed steps on one scalar") {
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.weight_decay = 0.5;
  cfg.beta1 = 0.9;
  cfg.beta2 = 0.99;
  cfg.adam_epsilon = 1e-8;
  std::vector<double> p{1.0}, g{0.0};
  AdamState state;

  // hand recurrence, decay applied to the parameter before the moment update
  double x = 1.0, m = 0.0, v = 0.0;
  const double grads[2] = {0.4, -0.2};
  for (int t = 1; t <= 2; ++t) {
    g[0] = grads[t - 1];
    adamw_step({{"w", &p, true}}, {{"w", &g, true}}, state, cfg);
    x -= 0.1 * 0.5 * x;
    m = 0.9 * m + 0.1 * grads[t - 1];
    v = 0.99 * v + 0.01 * grads[t - 1] * grads[t - 1];
    const double mh = m / (1 - std::pow(0.9, t));
    const double vh = v / (1 - std::pow(0.99, t));
    x -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
    CHECK(p[0] == doctest::Approx(x).epsilon(1e-14));
  }
  CHECK(state.step == 2);
  CHECK(state.first_moment[0][0] == doctest::Approx(0.9 * 0.04 + 0.1 * -0.2));
  // step 1: x = 0.95 - 0.1 = 0.85; step 2 by hand
  CHECK(p[0] == doctest::Approx(0.85 * 0.95 - 0.1 * (0.016 / 0.19) /
                                                 (std::sqrt(0.001984 / 0.0199) + 1e-8)));
}

TEST_CASE("adamw: biases are not decayed") {
  std::vector<double> w{1.0}, b{1.0}, gw{0.0}, gb{0.0};
  TrainConfig cfg;
  cfg.weight_decay = 0.1;
  AdamState state;
  adamw_step({{"w", &w, true}, {"b", &b, false}}, {{"w", &gw, true}, {"b", &gb, false}}, state, cfg);
  CHECK(w[0] < 1.0);
  CHECK(b[0] == 1.0);
}

TEST_CASE("gradient accumulation matches one large batch") {
  const auto data = separable_set(32, 5);
  ModelConfig mc;
  TrainConfig small;
  small.epochs = 1;
  small.batch_size = 8;
  small.accumulation_steps = 4;
  TrainConfig big = small;
  big.batch_size = 32;
  big.accumulation_steps = 1;
  auto a = train(data, data, mc, small);
  auto b = train(data, data, mc, big);
  CHECK(a.total_steps == 1);
  CHECK(b.total_steps == 1);
  auto ta = a.model.tensors();
  auto tb = b.model.tensors();
  for (std::size_t k = 0; k < ta.size(); ++k) {
    for (std::size_t i = 0; i < ta[k].values->size(); ++i) {
      CHECK((*ta[k].values)[i] == doctest::Approx((*tb[k].values)[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("training is deterministic and logs each evaluation") {
  const auto train_set = separable_set(64, 6);
  const auto dev_set = separable_set(32, 7);
  ModelConfig mc;
  TrainConfig cfg;
  cfg.epochs = 2;
  std::vector<std::string> lines;
  auto a = train(train_set, dev_set, mc, cfg, [&](const EvalLine& l) { lines.push_back(l.to_text()); });
  auto b = train(train_set, dev_set, mc, cfg);
  auto ta = a.model.tensors();
  auto tb = b.model.tensors();
  for (std::size_t k = 0; k < ta.size(); ++k) CHECK(*ta[k].values == *tb[k].values);
  // 64 samples / 8 per batch / 4 per step = 2 steps per epoch
  CHECK(a.total_steps == 4);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0].rfind("step=2 epoch=1 loss=", 0) == 0);
  CHECK(lines[0].find("selected=1") != std::string::npos);
}

TEST_CASE("training learns a separable rule") {
  const auto train_set = separable_set(400, 8);
  const auto dev_set = separable_set(100, 9);
  ModelConfig mc;
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.learning_rate = 1e-2;
  const auto r = train(train_set, dev_set, mc, cfg);
  CHECK(r.best_dev.macro_f1 >= 0.9);
}

TEST_CASE("prediction threshold is inclusive") {
  ModelConfig mc;
  Rng rng(1);
  Model model = Model::create(mc, rng);
  for (auto& t : model.tensors()) std::fill(t.values->begin(), t.values->end(), 0.0);
  Rng srng(2);
  const auto s = random_sample(srng, 2, true, 0.0);
  const auto p = predict(model, s, 0.5);
  CHECK(p.score == 0.5);
  CHECK(p.label);
  CHECK(p.sentence_labels == std::vector<bool>{true, true});

  const auto subs = random_sample(srng, 3, true, 1.0);
  const auto q = predict(make_model(FusionMethod::kScoreMin, 3), subs, 0.5);
  CHECK(q.score == 1.0);
  CHECK(q.label);
  CHECK(TrainConfig{}.threshold == 0.5);
  CHECK(TrainConfig{}.epochs == 5);
}

TEST_CASE("training rejects empty or unlabeled data") {
  ModelConfig mc;
  TrainConfig cfg;
  try {
    train({}, {}, mc, cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kEmptyDataset);
  }
  Rng rng(1);
  auto s = random_sample(rng, 2, true, 0.0);
  s.label.reset();
  CHECK_THROWS_AS(train({s}, {s}, mc, cfg), Error);
  cfg.threshold = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}
