#include "r2f/embeddings.hpp"

#include <charconv>
#include <cmath>

#include "r2f/error.hpp"
#include "r2f/io.hpp"

namespace r2f {

EmbeddingStore EmbeddingStore::load(const std::string& path) { return parse(read_file(path)); }

EmbeddingStore EmbeddingStore::parse(const std::string& content) {
  EmbeddingStore store;
  const auto lines = split(content, '\n');
  for (std::size_t n = 0; n < lines.size(); ++n) {
    std::string line = lines[n];
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3) throw ParseError(n + 1, "expected 3 tab-separated fields");
    if (fields[0].empty()) throw ParseError(n + 1, "empty doc_id");
    std::size_t index = 0;
    {
      const auto& f = fields[1];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), index);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw ParseError(n + 1, "bad sentence index '" + f + "'");
      }
    }
    std::vector<double> values;
    for (const auto& part : split(fields[2], ' ')) {
      if (part.empty()) continue;
      try {
        values.push_back(parse_double(part));
      } catch (const Error&) {
        throw ParseError(n + 1, "bad vector component '" + part + "'");
      }
    }
    try {
      store.insert(fields[0], index, std::move(values));
    } catch (const Error& e) {
      throw ParseError(n + 1, e.what());
    }
  }
  return store;
}

void EmbeddingStore::insert(const std::string& doc_id, std::size_t sentence_index,
                            std::vector<double> vector) {
  if (vector.empty()) throw Error(ErrorCode::kDimensionMismatch, "empty embedding vector");
  if (dimension_ == 0) dimension_ = vector.size();
  if (vector.size() != dimension_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "embedding dimension " + std::to_string(vector.size()) + " != " +
                    std::to_string(dimension_));
  }
  double norm2 = 0.0;
  for (double v : vector) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kValidation, "non-finite embedding component");
    norm2 += v * v;
  }
  if (norm2 == 0.0) throw Error(ErrorCode::kZeroVector, "zero-norm embedding");
  vectors_[{doc_id, sentence_index}] = std::move(vector);
}

std::optional<std::span<const double>> EmbeddingStore::find(const std::string& doc_id,
                                                             std::size_t sentence_index) const {
  const auto it = vectors_.find({doc_id, sentence_index});
  if (it == vectors_.end()) return std::nullopt;
  return std::span<const double>(it->second);
}

}  // namespace r2f
