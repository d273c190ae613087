#include "r2f/checkpoint.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "r2f/error.hpp"
#include "r2f/io.hpp"

namespace r2f {
namespace {

constexpr std::string_view kMagic = "r2f-checkpoint";

[[noreturn]] void corrupt(const std::string& what) {
  throw Error(ErrorCode::kCorruptCheckpoint, "corrupt checkpoint: " + what);
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_values(std::ostringstream& out, const char* key, const std::vector<double>& values) {
  out << key;
  for (double v : values) out << ' ' << format_double(v);
  out << '\n';
}

void write_mlp(std::ostringstream& out, const std::string& name, const Mlp& mlp) {
  out << "mlp " << name << ' '
      << (mlp.output_activation() == Activation::kTanh ? "tanh" : "identity");
  for (std::size_t w : mlp.widths()) out << ' ' << w;
  out << '\n';
  for (const auto& layer : mlp.layers()) {
    write_values(out, "weight", layer.weight);
    write_values(out, "bias", layer.bias);
  }
}

// Reads the body line by line, splitting on single spaces.
class Reader {
 public:
  explicit Reader(std::vector<std::string> lines) : lines_(std::move(lines)) {}

  bool done() const { return next_ >= lines_.size(); }

  std::vector<std::string> fields() {
    if (done()) corrupt("unexpected end of file");
    return split(lines_[next_++], ' ');
  }

  // "key rest..." where rest may contain spaces.
  std::pair<std::string, std::string> key_value() {
    if (done()) corrupt("unexpected end of file");
    const std::string& line = lines_[next_++];
    const auto space = line.find(' ');
    if (space == std::string::npos) return {line, ""};
    return {line.substr(0, space), line.substr(space + 1)};
  }

  const std::string& peek() const { return lines_[next_]; }

 private:
  std::vector<std::string> lines_;
  std::size_t next_ = 0;
};

double to_double(const std::string& text) {
  try {
    return parse_double(text);
  } catch (const Error&) {
    corrupt("bad number '" + text + "'");
  }
}

std::size_t to_size(const std::string& text) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) corrupt("bad integer '" + text + "'");
  return v;
}

std::vector<double> read_values(Reader& in, const std::string& key, std::size_t expected) {
  auto f = in.fields();
  if (f.empty() || f.front() != key) corrupt("expected '" + key + "' line");
  if (f.size() - 1 != expected) {
    corrupt("'" + key + "' has " + std::to_string(f.size() - 1) + " values, expected " +
            std::to_string(expected));
  }
  std::vector<double> out;
  out.reserve(expected);
  for (std::size_t i = 1; i < f.size(); ++i) out.push_back(to_double(f[i]));
  return out;
}

Mlp read_mlp(Reader& in, const std::string& name) {
  auto f = in.fields();
  if (f.size() < 5 || f[0] != "mlp" || f[1] != name) corrupt("expected mlp '" + name + "'");
  Activation act;
  if (f[2] == "tanh") {
    act = Activation::kTanh;
  } else if (f[2] == "identity") {
    act = Activation::kIdentity;
  } else {
    corrupt("unknown activation '" + f[2] + "'");
  }
  std::vector<std::size_t> widths;
  for (std::size_t i = 3; i < f.size(); ++i) widths.push_back(to_size(f[i]));
  Mlp mlp;
  try {
    mlp = Mlp(widths, act);
  } catch (const Error& e) {
    corrupt(e.what());
  }
  for (auto& layer : mlp.layers()) {
    layer.weight = read_values(in, "weight", layer.in * layer.out);
    layer.bias = read_values(in, "bias", layer.out);
  }
  return mlp;
}

}  // namespace

std::string serialize_checkpoint(const ModelCheckpoint& ckpt) {
  std::ostringstream out;
  out << kMagic << ' ' << ckpt.version << '\n';
  out << "fusion " << to_string(ckpt.model.fusion) << '\n';
  out << "threshold " << format_double(ckpt.threshold) << '\n';
  out << "evidence_slots " << ckpt.model.features.evidence_slots << '\n';
  const RetrievalConfig& r = ckpt.retrieval;
  out << "retrieval.method " << to_string(r.method) << '\n';
  out << "retrieval.k " << r.k << '\n';
  out << "retrieval.bm25_k1 " << format_double(r.bm25_k1) << '\n';
  out << "retrieval.bm25_b " << format_double(r.bm25_b) << '\n';
  out << "retrieval.bm25_idf_epsilon " << format_double(r.bm25_idf_epsilon) << '\n';
  out << "retrieval.rouge_variant " << to_string(r.rouge_variant) << '\n';
  out << "retrieval.random_seed " << r.random_seed << '\n';
  out << "train_digest " << ckpt.train_digest << '\n';
  out << "metrics " << ckpt.dev_metrics.size() << '\n';
  for (const auto& [name, value] : ckpt.dev_metrics) {
    out << "metric " << name << ' ' << format_double(value) << '\n';
  }
  out << "kernels " << ckpt.model.bank.size() << '\n';
  if (ckpt.model.bank.size() > 0) {
    write_values(out, "kernel_means", ckpt.model.bank.means);
    write_values(out, "kernel_widths", ckpt.model.bank.widths);
  }
  write_mlp(out, "reader.encoder", ckpt.model.reader.encoder);
  write_mlp(out, "reader.head", ckpt.model.reader.head);
  out << "kernel_head " << (ckpt.model.kernel_head.empty() ? 0 : 1) << '\n';
  if (!ckpt.model.kernel_head.empty()) write_mlp(out, "fusion.kernel_head", ckpt.model.kernel_head);
  const std::string body = out.str();
  return body + "end " + hex64(fnv1a64(body)) + '\n';
}

ModelCheckpoint parse_checkpoint(const std::string& content) {
  const auto first_nl = content.find('\n');
  const std::string header = content.substr(0, first_nl);
  const auto header_fields = split(header, ' ');
  if (header_fields.size() != 2 || header_fields[0] != kMagic) corrupt("missing header");
  const int version = static_cast<int>(to_size(header_fields[1]));
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kVersionMismatch,
                "checkpoint format version " + std::to_string(version) +
                    " is not supported; this build reads version " +
                    std::to_string(kCheckpointVersion));
  }

  // the trailer must be the last line, preceded by a newline
  if (content.size() < 2 || content.back() != '\n') corrupt("truncated (no end marker)");
  const auto trailer_start = content.rfind('\n', content.size() - 2);
  if (trailer_start == std::string::npos) corrupt("truncated (no end marker)");
  const std::string trailer = content.substr(trailer_start + 1, content.size() - trailer_start - 2);
  if (trailer.rfind("end ", 0) != 0) corrupt("truncated (no end marker)");
  const std::string body = content.substr(0, trailer_start + 1);
  if (trailer.substr(4) != hex64(fnv1a64(body))) corrupt("checksum mismatch");

  auto lines = split(body, '\n');
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  Reader in(std::vector<std::string>(lines.begin() + 1, lines.end()));
  const auto expect = [&](const char* key) {
    auto [k, v] = in.key_value();
    if (k != key) corrupt(std::string("expected '") + key + "', found '" + k + "'");
    return v;
  };

  ModelCheckpoint ckpt;
  ckpt.version = version;
  try {
    ckpt.model.fusion = parse_fusion_method(expect("fusion"));
    ckpt.threshold = to_double(expect("threshold"));
    ckpt.model.features.evidence_slots = to_size(expect("evidence_slots"));
    RetrievalConfig& r = ckpt.retrieval;
    r.method = parse_retrieval_method(expect("retrieval.method"));
    r.k = to_size(expect("retrieval.k"));
    r.bm25_k1 = to_double(expect("retrieval.bm25_k1"));
    r.bm25_b = to_double(expect("retrieval.bm25_b"));
    r.bm25_idf_epsilon = to_double(expect("retrieval.bm25_idf_epsilon"));
    r.rouge_variant = parse_rouge_variant(expect("retrieval.rouge_variant"));
    r.random_seed = to_size(expect("retrieval.random_seed"));
    ckpt.train_digest = expect("train_digest");
    const std::size_t metrics = to_size(expect("metrics"));
    for (std::size_t i = 0; i < metrics; ++i) {
      auto f = in.fields();
      if (f.size() != 3 || f[0] != "metric") corrupt("bad metric line");
      ckpt.dev_metrics[f[1]] = to_double(f[2]);
    }
    const std::size_t kernels = to_size(expect("kernels"));
    if (kernels > 0) {
      ckpt.model.bank.means = read_values(in, "kernel_means", kernels);
      ckpt.model.bank.widths = read_values(in, "kernel_widths", kernels);
    }
    ckpt.model.reader.encoder = read_mlp(in, "reader.encoder");
    ckpt.model.reader.head = read_mlp(in, "reader.head");
    if (to_size(expect("kernel_head")) == 1) {
      ckpt.model.kernel_head = read_mlp(in, "fusion.kernel_head");
    }
    if (!in.done()) corrupt("trailing content before end marker");
    ckpt.model.validate();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptCheckpoint) throw;
    corrupt(e.what());
  }
  return ckpt;
}

void save_checkpoint(const ModelCheckpoint& checkpoint, const std::string& path) {
  write_file_atomic(path, serialize_checkpoint(checkpoint));
}

ModelCheckpoint load_checkpoint(const std::string& path) { return parse_checkpoint(read_file(path)); }

}  // namespace r2f
