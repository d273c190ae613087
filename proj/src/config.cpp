#include "r2f/config.hpp"

#include <charconv>
#include <sstream>

#include "r2f/error.hpp"
#include "r2f/io.hpp"

namespace r2f {

RunConfig::RunConfig() {
  values_ = {
      {"retrieval.method", "rouge1"},
      {"retrieval.k", "5"},
      {"retrieval.bm25_k1", "1.5"},
      {"retrieval.bm25_b", "0.75"},
      {"retrieval.bm25_idf_epsilon", "0.25"},
      {"retrieval.rouge_variant", "f1"},
      {"retrieval.seed", "42"},
      {"reader.encoder_hidden", "64"},
      {"reader.dim", "32"},
      {"reader.head_hidden", "64"},
      {"reader.init_scale", "0.1"},
      {"fusion.method", "score_min"},
      {"fusion.kernels", "11"},
      {"fusion.kernel_width", "0.01"},
      {"fusion.kernel_means", "linspace"},
      {"fusion.head_hidden", "64"},
      {"train.epochs", "5"},
      {"train.batch_size", "8"},
      {"train.accumulation_steps", "4"},
      {"train.learning_rate", "0.001"},
      {"train.weight_decay", "0.01"},
      {"train.eval_interval", "0"},
      {"train.seed", "42"},
      {"train.threshold", "0.5"},
      {"train.selection", "macro_f1"},
      {"predict.threshold", ""},
      {"data.id_field", "id"},
      {"data.hypothesis_field", "hypothesis"},
      {"data.premise_field", "premise"},
      {"data.label_field", "label"},
      {"text.abbreviations", ""},
      {"synth.train_size", "2000"},
      {"synth.dev_size", "500"},
      {"synth.test_size", "500"},
      {"synth.corruption_rate", "0.5"},
      {"synth.seed", "42"},
      {"synth.min_premise_sentences", "8"},
      {"synth.max_premise_sentences", "40"},
      {"synth.min_hypothesis_sentences", "3"},
      {"synth.max_hypothesis_sentences", "8"},
      {"synth.two_source_rate", "0.3"},
      {"synth.verbatim_rate", "0.05"},
      {"synth.people_per_document", "2"},
      {"stats.edges", "150,300,500,800,1000"},
      {"gradcheck.samples", "100"},
      {"gradcheck.min_sentences", "2"},
      {"gradcheck.max_sentences", "10"},
      {"gradcheck.step", "1e-5"},
      {"gradcheck.floor", "1e-6"},
      {"gradcheck.tolerance", "1e-4"},
      {"gradcheck.seed", "42"},
      {"sweep.ks", "3,4,5,6,7"},
  };
}

void RunConfig::merge_text(std::string_view content) {
  std::size_t line_no = 0;
  for (const auto& raw : split(content, '\n')) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (!has(key)) throw ParseError(line_no, "unknown config key '" + key + "'");
    values_[key] = trim(line.substr(eq + 1));
  }
}

void RunConfig::merge_file(const std::string& path) { merge_text(read_file(path)); }

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!has(key)) throw Error(ErrorCode::kValidation, "unknown config key '" + key + "'");
  values_[key] = value;
}

void RunConfig::set_seed(std::uint64_t seed) {
  const std::string v = std::to_string(seed);
  for (const char* key : {"retrieval.seed", "train.seed", "synth.seed", "gradcheck.seed"}) {
    values_[key] = v;
  }
}

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorCode::kValidation, "unknown config key '" + key + "'");
  return it->second;
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  for (const auto& [key, value] : values_) out << key << '=' << value << '\n';
  return out.str();
}

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* want) {
  throw Error(ErrorCode::kValidation,
              "config key '" + key + "': '" + value + "' is not " + want);
}

}  // namespace

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  const std::string& v = get(key);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    bad_value(key, v, "a non-negative integer");
  }
  return out;
}

std::size_t RunConfig::get_size(const std::string& key) const {
  return static_cast<std::size_t>(get_u64(key));
}

double RunConfig::get_double(const std::string& key) const {
  const std::string& v = get(key);
  try {
    return parse_double(v);
  } catch (const Error&) {
    bad_value(key, v, "a number");
  }
}

std::vector<std::size_t> RunConfig::get_sizes(const std::string& key) const {
  const std::string& v = get(key);
  std::vector<std::size_t> out;
  if (trim(v).empty()) return out;
  for (const auto& part : split(v, ',')) {
    const std::string item = trim(part);
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), n);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      bad_value(key, v, "a comma-separated list of integers");
    }
    out.push_back(n);
  }
  return out;
}

RetrievalConfig RunConfig::retrieval() const {
  RetrievalConfig c;
  try {
    c.method = parse_retrieval_method(get("retrieval.method"));
    c.rouge_variant = parse_rouge_variant(get("retrieval.rouge_variant"));
  } catch (const Error& e) {
    throw Error(ErrorCode::kValidation, e.what());
  }
  c.k = get_size("retrieval.k");
  c.bm25_k1 = get_double("retrieval.bm25_k1");
  c.bm25_b = get_double("retrieval.bm25_b");
  c.bm25_idf_epsilon = get_double("retrieval.bm25_idf_epsilon");
  c.random_seed = get_u64("retrieval.seed");
  c.validate();
  return c;
}

ModelConfig RunConfig::model() const {
  ModelConfig c;
  c.reader.encoder_hidden = get_sizes("reader.encoder_hidden");
  c.reader.inference_dim = get_size("reader.dim");
  c.reader.head_hidden = get_sizes("reader.head_hidden");
  c.init_scale = get_double("reader.init_scale");
  try {
    c.fusion = parse_fusion_method(get("fusion.method"));
  } catch (const Error& e) {
    throw Error(ErrorCode::kValidation, e.what());
  }
  c.kernel_count = get_size("fusion.kernels");
  c.kernel_width = get_double("fusion.kernel_width");
  const std::string& means = get("fusion.kernel_means");
  if (means == "linspace") {
    c.random_kernel_means = false;
  } else if (means == "uniform") {
    c.random_kernel_means = true;
  } else {
    bad_value("fusion.kernel_means", means, "'linspace' or 'uniform'");
  }
  c.kernel_head_hidden = get_sizes("fusion.head_hidden");
  c.evidence_slots = get_size("retrieval.k");
  for (std::size_t w : c.reader.encoder_hidden) {
    if (w == 0) bad_value("reader.encoder_hidden", get("reader.encoder_hidden"), "positive widths");
  }
  for (std::size_t w : c.reader.head_hidden) {
    if (w == 0) bad_value("reader.head_hidden", get("reader.head_hidden"), "positive widths");
  }
  for (std::size_t w : c.kernel_head_hidden) {
    if (w == 0) bad_value("fusion.head_hidden", get("fusion.head_hidden"), "positive widths");
  }
  c.validate();
  return c;
}

TrainConfig RunConfig::train() const {
  TrainConfig c;
  c.epochs = get_size("train.epochs");
  c.batch_size = get_size("train.batch_size");
  c.accumulation_steps = get_size("train.accumulation_steps");
  c.learning_rate = get_double("train.learning_rate");
  c.weight_decay = get_double("train.weight_decay");
  c.eval_interval = get_size("train.eval_interval");
  c.seed = get_u64("train.seed");
  c.threshold = get_double("train.threshold");
  try {
    c.selection = parse_selection_metric(get("train.selection"));
  } catch (const Error& e) {
    throw Error(ErrorCode::kValidation, e.what());
  }
  c.validate();
  return c;
}

FieldMapping RunConfig::fields() const {
  return {get("data.id_field"), get("data.hypothesis_field"), get("data.premise_field"),
          get("data.label_field")};
}

SyntheticConfig RunConfig::synthetic() const {
  SyntheticConfig c;
  c.train_size = get_size("synth.train_size");
  c.dev_size = get_size("synth.dev_size");
  c.test_size = get_size("synth.test_size");
  c.corruption_rate = get_double("synth.corruption_rate");
  c.seed = get_u64("synth.seed");
  c.min_premise_sentences = get_size("synth.min_premise_sentences");
  c.max_premise_sentences = get_size("synth.max_premise_sentences");
  c.min_hypothesis_sentences = get_size("synth.min_hypothesis_sentences");
  c.max_hypothesis_sentences = get_size("synth.max_hypothesis_sentences");
  c.two_source_rate = get_double("synth.two_source_rate");
  c.verbatim_rate = get_double("synth.verbatim_rate");
  c.people_per_document = get_size("synth.people_per_document");
  c.validate();
  return c;
}

GradCheckConfig RunConfig::gradcheck() const {
  GradCheckConfig c;
  c.samples = get_size("gradcheck.samples");
  c.min_sentences = get_size("gradcheck.min_sentences");
  c.max_sentences = get_size("gradcheck.max_sentences");
  c.step = get_double("gradcheck.step");
  c.floor = get_double("gradcheck.floor");
  c.seed = get_u64("gradcheck.seed");
  if (c.min_sentences == 0 || c.min_sentences > c.max_sentences) {
    bad_value("gradcheck.min_sentences", get("gradcheck.min_sentences"), "a valid range start");
  }
  if (!(c.step > 0.0)) bad_value("gradcheck.step", get("gradcheck.step"), "positive");
  return c;
}

double RunConfig::gradcheck_tolerance() const { return get_double("gradcheck.tolerance"); }

std::vector<std::size_t> RunConfig::stats_edges() const { return get_sizes("stats.edges"); }

std::vector<std::size_t> RunConfig::sweep_ks() const {
  auto ks = get_sizes("sweep.ks");
  if (ks.empty()) bad_value("sweep.ks", get("sweep.ks"), "a non-empty list");
  for (std::size_t k : ks) {
    if (k == 0) bad_value("sweep.ks", get("sweep.ks"), "a list of positive integers");
  }
  return ks;
}

AbbreviationSet RunConfig::abbreviations() const {
  const std::string& path = get("text.abbreviations");
  if (path.empty()) return AbbreviationSet::defaults();
  return AbbreviationSet::from_file(path);
}

}  // namespace r2f
