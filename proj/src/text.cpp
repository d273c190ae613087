#include "r2f/text.hpp"

#include <algorithm>

#include "r2f/error.hpp"
#include "r2f/io.hpp"
#include "utf8.hpp"

namespace r2f {
namespace {

constexpr std::string_view kDefaultAbbreviations =
#include "abbreviations_data.inc"
    ;

std::string lowercase(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    const auto d = utf8::decode(text, i);
    utf8::append(out, utf8::to_lower(d.cp));
    i += d.length;
  }
  return out;
}

bool is_closing(char32_t cp) {
  return cp == '"' || cp == '\'' || cp == ')' || cp == ']' || cp == '}' || cp == 0x2019 ||
         cp == 0x201D || cp == 0xBB;
}

bool is_opening(char32_t cp) {
  return cp == '"' || cp == '\'' || cp == '(' || cp == '[' || cp == 0x2018 || cp == 0x201C ||
         cp == 0xAB;
}

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

// The whitespace-delimited word that ends at `dot` (inclusive), stripped of
// leading opening punctuation and lowercased.
std::string word_ending_at(std::string_view text, std::size_t dot) {
  std::size_t begin = dot;
  while (begin > 0) {
    const char c = text[begin - 1];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') break;
    --begin;
  }
  while (begin < dot && (text[begin] == '(' || text[begin] == '"' || text[begin] == '\'' ||
                         text[begin] == '[')) {
    ++begin;
  }
  return lowercase(text.substr(begin, dot + 1 - begin));
}

bool is_initial(std::string_view word) {
  // "j." style single-letter initials
  return word.size() == 2 && word[1] == '.' && word[0] >= 'a' && word[0] <= 'z';
}

void push_sentence(std::string_view text, std::size_t begin, std::size_t end, SentenceList& out) {
  while (begin < end) {
    const auto d = utf8::decode(text, begin);
    if (!utf8::is_space(d.cp)) break;
    begin += d.length;
  }
  while (end > begin) {
    // back up to the start of the last code point
    std::size_t k = end - 1;
    while (k > begin && (static_cast<unsigned char>(text[k]) & 0xC0) == 0x80) --k;
    const auto d = utf8::decode(text, k);
    if (!utf8::is_space(d.cp)) break;
    end = k;
  }
  if (begin >= end) return;
  out.sentences.emplace_back(text.substr(begin, end - begin));
  out.offsets.push_back({begin, end});
}

}  // namespace

TokenSeq::TokenSeq(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  for (const auto& t : tokens_) ++counts_[t];
}

int TokenSeq::count(const std::string& token) const {
  const auto it = counts_.find(token);
  return it == counts_.end() ? 0 : it->second;
}

const AbbreviationSet& AbbreviationSet::defaults() {
  static const AbbreviationSet instance = [] {
    return from_lines(split(kDefaultAbbreviations, '\n'));
  }();
  return instance;
}

AbbreviationSet AbbreviationSet::from_file(const std::string& path) {
  return from_lines(read_lines(path));
}

AbbreviationSet AbbreviationSet::from_lines(const std::vector<std::string>& lines) {
  AbbreviationSet set;
  for (const auto& raw : lines) {
    std::string entry = trim(raw);
    if (entry.empty() || entry.front() == '#') continue;
    entry = lowercase(entry);
    if (entry.back() != '.') entry.push_back('.');
    set.entries_.insert(std::move(entry));
  }
  return set;
}

bool AbbreviationSet::contains(std::string_view lowercased) const {
  return entries_.count(std::string(lowercased)) > 0;
}

SentenceList split_sentences(std::string_view text, const AbbreviationSet& abbreviations) {
  if (normalize_for_substring(text).empty()) {
    throw Error(ErrorCode::kEmptyDocument, "document is empty");
  }
  SentenceList out;
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminal(text[i])) {
      ++i;
      continue;
    }
    const std::size_t mark = i;
    std::size_t j = i + 1;
    // runs like "?!" or "..." and closing quotes/brackets stay with the sentence
    while (j < text.size()) {
      if (is_terminal(text[j])) {
        ++j;
        continue;
      }
      const auto d = utf8::decode(text, j);
      if (!is_closing(d.cp)) break;
      j += d.length;
    }
    if (j >= text.size()) break;
    const auto after = utf8::decode(text, j);
    if (!utf8::is_space(after.cp)) {
      i = j;
      continue;
    }
    std::size_t k = j;
    while (k < text.size()) {
      const auto d = utf8::decode(text, k);
      if (!utf8::is_space(d.cp)) break;
      k += d.length;
    }
    if (k >= text.size()) break;
    const auto next = utf8::decode(text, k);
    const bool starts_sentence =
        utf8::is_upper(next.cp) || utf8::is_digit(next.cp) || is_opening(next.cp);
    bool split_here = starts_sentence;
    if (split_here && text[mark] == '.' && !is_terminal(text[mark + 1])) {
      const std::string word = word_ending_at(text, mark);
      if (abbreviations.contains(word) || is_initial(word)) split_here = false;
    }
    if (split_here) {
      push_sentence(text, start, j, out);
      start = k;
    }
    i = k;
  }
  push_sentence(text, start, text.size(), out);
  return out;
}

std::vector<std::string> word_runs(std::string_view sentence) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < sentence.size()) {
    const auto d = utf8::decode(sentence, i);
    if (utf8::is_word_char(d.cp)) {
      utf8::append(current, d.cp);
    } else if (!current.empty() && utf8::is_joiner(d.cp) && i + d.length < sentence.size() &&
               utf8::is_word_char(utf8::decode(sentence, i + d.length).cp)) {
      utf8::append(current, d.cp);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
    i += d.length;
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

TokenSeq tokenize(std::string_view sentence) {
  std::vector<std::string> tokens = word_runs(sentence);
  for (auto& t : tokens) t = lowercase(t);
  return TokenSeq(std::move(tokens));
}

std::string normalize_for_substring(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < text.size();) {
    const auto d = utf8::decode(text, i);
    i += d.length;
    if (utf8::is_space(d.cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    utf8::append(out, utf8::to_lower(d.cp));
  }
  return out;
}

}  // namespace r2f
