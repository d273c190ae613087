#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "r2f/corpus.hpp"
#include "r2f/model.hpp"
#include "r2f/retrieval.hpp"
#include "r2f/text.hpp"
#include "r2f/training.hpp"

namespace r2f {

// Flat key=value settings with section prefixes ("retrieval.k = 5").
// Every key has a default; unknown keys are rejected.
class RunConfig {
 public:
  RunConfig();

  // '#' starts a comment; blank lines are ignored. Throws ParseError.
  void merge_text(std::string_view content);
  void merge_file(const std::string& path);
  // Throws kValidation for an unknown key.
  void set(const std::string& key, const std::string& value);
  // Sets every seed-bearing key.
  void set_seed(std::uint64_t seed);

  const std::string& get(const std::string& key) const;
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  // All keys in sorted order, one "key=value" per line.
  std::string to_text() const;

  // Typed views; throw kValidation naming the key on a malformed value.
  RetrievalConfig retrieval() const;
  ModelConfig model() const;
  TrainConfig train() const;
  FieldMapping fields() const;
  SyntheticConfig synthetic() const;
  GradCheckConfig gradcheck() const;
  double gradcheck_tolerance() const;
  std::vector<std::size_t> stats_edges() const;
  std::vector<std::size_t> sweep_ks() const;
  AbbreviationSet abbreviations() const;

 private:
  std::size_t get_size(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::vector<std::size_t> get_sizes(const std::string& key) const;

  std::map<std::string, std::string> values_;
};

}  // namespace r2f
