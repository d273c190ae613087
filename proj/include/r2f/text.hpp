#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace r2f {

// Half-open byte range [begin, end) into the source document.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const Span&) const = default;
};

struct SentenceList {
  std::vector<std::string> sentences;
  std::vector<Span> offsets;

  std::size_t size() const { return sentences.size(); }
  bool empty() const { return sentences.empty(); }
  const std::string& operator[](std::size_t i) const { return sentences[i]; }
};

// Normalized tokens plus their multiset view.
class TokenSeq {
 public:
  TokenSeq() = default;
  explicit TokenSeq(std::vector<std::string> tokens);

  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::unordered_map<std::string, int>& counts() const { return counts_; }
  int count(const std::string& token) const;
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }

  bool operator==(const TokenSeq& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> counts_;
};

// Lowercased abbreviations including their trailing period, e.g. "mr.".
class AbbreviationSet {
 public:
  AbbreviationSet() = default;

  // The list compiled in from data/abbreviations.txt.
  static const AbbreviationSet& defaults();
  // One abbreviation per line; blank lines and '#' comments are skipped.
  static AbbreviationSet from_file(const std::string& path);
  static AbbreviationSet from_lines(const std::vector<std::string>& lines);

  bool contains(std::string_view lowercased) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_set<std::string> entries_;
};

// Rule-based segmentation on . ! ? followed by whitespace and an
// uppercase letter, digit, or opening quote. Throws kEmptyDocument.
SentenceList split_sentences(std::string_view text,
                             const AbbreviationSet& abbreviations = AbbreviationSet::defaults());

// Letter/digit runs with internal apostrophes and hyphens, lowercased.
TokenSeq tokenize(std::string_view sentence);

// Same token boundaries as tokenize() but with the original casing kept.
std::vector<std::string> word_runs(std::string_view sentence);

// Lowercase, collapse whitespace runs to one space, trim.
std::string normalize_for_substring(std::string_view text);

}  // namespace r2f
