#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace r2f {

// Precomputed sentence embeddings keyed by (document key, sentence index).
//
// File format, one row per sentence:
//   doc_id<TAB>sentence_index<TAB>f_1 f_2 ... f_d
// Premise sentences of pair `X` are keyed "X#p", hypothesis sentences "X#h".
class EmbeddingStore {
 public:
  static EmbeddingStore load(const std::string& path);
  static EmbeddingStore parse(const std::string& content);

  static std::string premise_key(const std::string& pair_id) { return pair_id + "#p"; }
  static std::string hypothesis_key(const std::string& pair_id) { return pair_id + "#h"; }

  // Throws on dimension mismatch, non-finite values or zero norm.
  void insert(const std::string& doc_id, std::size_t sentence_index, std::vector<double> vector);

  std::optional<std::span<const double>> find(const std::string& doc_id,
                                               std::size_t sentence_index) const;
  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return vectors_.size(); }

 private:
  std::size_t dimension_ = 0;
  std::map<std::pair<std::string, std::size_t>, std::vector<double>> vectors_;
};

}  // namespace r2f
