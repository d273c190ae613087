#include "r2f/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "r2f/error.hpp"
#include "r2f/io.hpp"
#include "r2f/random.hpp"

namespace r2f {

std::string to_string(SelectionMetric metric) {
  return metric == SelectionMetric::kMacroF1 ? "macro_f1" : "micro_f1";
}

SelectionMetric parse_selection_metric(std::string_view name) {
  if (name == "macro_f1") return SelectionMetric::kMacroF1;
  if (name == "micro_f1") return SelectionMetric::kMicroF1;
  throw Error(ErrorCode::kInvalidArgument, "unknown selection metric '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (epochs == 0 || batch_size == 0 || accumulation_steps == 0) {
    throw Error(ErrorCode::kValidation, "epochs, batch size and accumulation steps must be >= 1");
  }
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::kValidation, "learning rate must be > 0");
  if (!(weight_decay >= 0.0)) throw Error(ErrorCode::kValidation, "weight decay must be >= 0");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::kValidation, "threshold must lie in (0,1)");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && adam_epsilon > 0.0)) {
    throw Error(ErrorCode::kValidation, "invalid Adam coefficients");
  }
}

std::string TrainConfig::digest() const {
  std::ostringstream out;
  out << "epochs=" << epochs << ";batch_size=" << batch_size
      << ";accumulation_steps=" << accumulation_steps << ";lr=" << format_double(learning_rate)
      << ";weight_decay=" << format_double(weight_decay) << ";beta1=" << format_double(beta1)
      << ";beta2=" << format_double(beta2) << ";eps=" << format_double(adam_epsilon)
      << ";eval_interval=" << eval_interval << ";seed=" << seed
      << ";threshold=" << format_double(threshold) << ";selection=" << to_string(selection);
  return out.str();
}

void adamw_step(std::vector<TensorRef> params, std::vector<TensorRef> grads, AdamState& state,
                const TrainConfig& config) {
  if (params.size() != grads.size()) {
    throw Error(ErrorCode::kShapeMismatch, "parameter and gradient lists differ");
  }
  if (state.first_moment.empty()) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.values->size(), 0.0);
      state.second_moment.emplace_back(p.values->size(), 0.0);
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw Error(ErrorCode::kShapeMismatch, "optimizer state does not match parameters");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    std::vector<double>& p = *params[k].values;
    const std::vector<double>& g = *grads[k].values;
    std::vector<double>& m = state.first_moment[k];
    std::vector<double>& v = state.second_moment[k];
    if (g.size() != p.size() || m.size() != p.size()) {
      throw Error(ErrorCode::kShapeMismatch, "tensor '" + params[k].name + "' changed shape");
    }
    const bool decay = params[k].is_weight && config.weight_decay > 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (decay) p[i] -= config.learning_rate * config.weight_decay * p[i];
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_epsilon);
    }
  }
}

std::string EvalLine::to_text() const {
  std::ostringstream out;
  out << "step=" << step << " epoch=" << epoch << " loss=" << format_double(loss)
      << " dev_micro_f1=" << format_double(dev_micro_f1)
      << " dev_macro_f1=" << format_double(dev_macro_f1) << " selected=" << (selected ? 1 : 0);
  return out.str();
}

SamplePrediction predict(const Model& model, const PreparedSample& sample, double threshold) {
  const ForwardPass pass = forward(model, sample);
  SamplePrediction out;
  out.score = pass.fusion.sample_score;
  out.label = out.score >= threshold;
  out.argmin_index = pass.fusion.argmin_index;
  out.sentence_scores = pass.sentence_scores;
  for (double s : pass.sentence_scores) out.sentence_labels.push_back(s >= threshold);
  return out;
}

DocEvalReport evaluate(const Model& model, const std::vector<PreparedSample>& samples,
                       double threshold) {
  std::vector<bool> predicted, gold;
  for (const auto& sample : samples) {
    if (!sample.label) continue;
    predicted.push_back(predict(model, sample, threshold).label);
    gold.push_back(*sample.label);
  }
  return doc_eval(predicted, gold);
}

namespace {

void require_labeled(const std::vector<PreparedSample>& samples, const char* what) {
  if (samples.empty()) throw Error(ErrorCode::kEmptyDataset, std::string(what) + " set is empty");
  for (const auto& s : samples) {
    if (!s.label) {
      throw Error(ErrorCode::kEmptyDataset,
                  std::string(what) + " sample '" + s.id + "' has no document label");
    }
  }
}

double selection_value(const DocEvalReport& report, SelectionMetric metric) {
  return metric == SelectionMetric::kMacroF1 ? report.macro_f1 : report.micro_f1;
}

bool all_finite(GradientTape& tape) {
  for (const auto& t : tape.tensors()) {
    for (double v : *t.values) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

}  // namespace

TrainResult train(const std::vector<PreparedSample>& train_set,
                  const std::vector<PreparedSample>& dev_set, const ModelConfig& model_config,
                  const TrainConfig& config, const TrainLogger& logger) {
  config.validate();
  require_labeled(train_set, "training");
  require_labeled(dev_set, "dev");

  Rng init_rng(config.seed);
  Model model = Model::create(model_config, init_rng);
  Rng order_rng(fnv1a64("shuffle", config.seed));
  GradientTape tape(model);
  AdamState adam;

  TrainResult result;
  result.model = model;
  double best_value = -1.0;
  double loss_sum = 0.0;
  std::size_t loss_count = 0;
  std::size_t step = 0;
  std::size_t last_eval_step = 0;
  bool evaluated = false;

  const auto run_eval = [&](std::size_t epoch) {
    const DocEvalReport report = evaluate(model, dev_set, config.threshold);
    EvalLine line;
    line.step = step;
    line.epoch = epoch;
    line.loss = loss_count == 0 ? 0.0 : loss_sum / static_cast<double>(loss_count);
    line.dev_micro_f1 = report.micro_f1;
    line.dev_macro_f1 = report.macro_f1;
    const double value = selection_value(report, config.selection);
    line.selected = value > best_value;
    if (line.selected) {
      best_value = value;
      result.model = model;
      result.best_dev = report;
      result.best_step = step;
    }
    loss_sum = 0.0;
    loss_count = 0;
    last_eval_step = step;
    evaluated = true;
    result.log.push_back(line);
    if (logger) logger(line);
  };

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    order_rng.shuffle(order);
    std::size_t window = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const double inv_batch = 1.0 / static_cast<double>(end - begin);
      for (std::size_t b = begin; b < end; ++b) {
        const PreparedSample& sample = train_set[order[b]];
        const ForwardPass pass = forward(model, sample);
        const double loss = bce_loss(pass.fusion.sample_score, *sample.label);
        if (!std::isfinite(loss)) {
          throw Error(ErrorCode::kNonFiniteLoss, "non-finite loss on sample '" + sample.id +
                                                     "' at step " + std::to_string(step));
        }
        loss_sum += loss;
        ++loss_count;
        backward(model, pass, bce_grad(pass.fusion.sample_score, *sample.label) * inv_batch, tape);
      }
      ++window;
      const bool last_batch = end == order.size();
      if (window == config.accumulation_steps || last_batch) {
        tape.scale(1.0 / static_cast<double>(window));
        if (!all_finite(tape)) {
          throw Error(ErrorCode::kNonFiniteLoss,
                      "non-finite gradient at step " + std::to_string(step + 1));
        }
        adamw_step(model.tensors(), tape.tensors(), adam, config);
        tape.zero();
        window = 0;
        ++step;
        if (config.eval_interval > 0 && step % config.eval_interval == 0) run_eval(epoch);
      }
    }
    if (config.eval_interval == 0) run_eval(epoch);
  }
  if (!evaluated || last_eval_step != step) run_eval(config.epochs);
  result.total_steps = step;
  return result;
}

GradCheckResult gradient_check(const ModelConfig& model_config, const GradCheckConfig& config) {
  Rng rng(config.seed);
  Model model = Model::create(model_config, rng);
  // biases random too, so every tensor carries signal
  model.reader.init_uniform(rng, model_config.init_scale, true);
  if (!model.kernel_head.empty()) model.kernel_head.init_uniform(rng, model_config.init_scale, true);

  GradCheckResult result;
  GradientTape tape(model);
  const std::size_t feature_dim = model.reader.feature_dim();
  for (std::size_t n = 0; n < config.samples; ++n) {
    PreparedSample sample;
    sample.id = "gradcheck-" + std::to_string(n);
    const auto m = static_cast<std::size_t>(
        rng.between(static_cast<int>(config.min_sentences), static_cast<int>(config.max_sentences)));
    for (std::size_t i = 0; i < m; ++i) {
      PreparedSentence s;
      s.is_substring = rng.bernoulli(config.substring_rate);
      if (!s.is_substring) {
        for (std::size_t f = 0; f < feature_dim; ++f) s.features.push_back(rng.uniform());
      }
      sample.sentences.push_back(std::move(s));
    }
    const bool label = rng.bernoulli(0.5);
    sample.label = label;

    tape.zero();
    const ForwardPass pass = forward(model, sample);
    backward(model, pass, bce_grad(pass.fusion.sample_score, label), tape);
    const auto loss_at = [&]() { return bce_loss(forward(model, sample).fusion.sample_score, label); };

    auto params = model.tensors();
    auto grads = tape.tensors();
    for (std::size_t k = 0; k < params.size(); ++k) {
      std::vector<double>& p = *params[k].values;
      const std::vector<double>& g = *grads[k].values;
      std::vector<std::size_t> by_size(p.size());
      std::iota(by_size.begin(), by_size.end(), 0);
      const std::size_t top = std::min(config.largest_per_tensor, p.size());
      std::partial_sort(by_size.begin(), by_size.begin() + static_cast<std::ptrdiff_t>(top),
                        by_size.end(), [&](std::size_t a, std::size_t b) {
                          return std::abs(g[a]) > std::abs(g[b]) || (std::abs(g[a]) == std::abs(g[b]) && a < b);
                        });
      std::vector<std::size_t> coords(by_size.begin(), by_size.begin() + static_cast<std::ptrdiff_t>(top));
      for (std::size_t r = 0; r < config.random_per_tensor; ++r) coords.push_back(rng.index(p.size()));
      for (std::size_t i : coords) {
        const double original = p[i];
        p[i] = original + config.step;
        const double plus = loss_at();
        p[i] = original - config.step;
        const double minus = loss_at();
        p[i] = original;
        const double numeric = (plus - minus) / (2.0 * config.step);
        const double analytic = g[i];
        const double denom = std::max({std::abs(analytic), std::abs(numeric), config.floor});
        const double rel = std::abs(analytic - numeric) / denom;
        ++result.coordinates;
        if (rel > result.max_relative_error || !std::isfinite(rel)) {
          result.max_relative_error = std::isfinite(rel) ? rel : HUGE_VAL;
          result.worst_tensor = params[k].name;
        }
      }
    }
  }
  return result;
}

}  // namespace r2f
