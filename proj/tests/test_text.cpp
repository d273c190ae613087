#include <doctest.h>

#include "r2f/error.hpp"
#include "r2f/text.hpp"

using namespace r2f;

namespace {
std::vector<std::string> words(std::string_view s) { return tokenize(s).tokens(); }
}  // namespace

TEST_CASE("split_sentences: plain two sentences") {
  const auto s = split_sentences("He left. She stayed.");
  REQUIRE(s.size() == 2);
  CHECK(s[0] == "He left.");
  CHECK(s[1] == "She stayed.");
  CHECK(s.offsets[1].begin == 9);
}

TEST_CASE("split_sentences: abbreviation does not split") {
  const auto s = split_sentences("Mr. Smith arrived.");
  REQUIRE(s.size() == 1);
  CHECK(s[0] == "Mr. Smith arrived.");
}

TEST_CASE("split_sentences: decimal numbers stay intact") {
  const auto s = split_sentences("Costs rose 3.5 percent. Then fell.");
  REQUIRE(s.size() == 2);
  CHECK(s[0].find("3.5") != std::string::npos);
  CHECK(s[1] == "Then fell.");
}

TEST_CASE("split_sentences: edge cases") {
  CHECK_THROWS_AS(split_sentences(""), Error);
  CHECK_THROWS_AS(split_sentences("   \n "), Error);
  CHECK(split_sentences("no terminal punctuation").size() == 1);
  CHECK(split_sentences("Wait! Really? Yes.").size() == 3);
  // lowercase continuation is not a boundary
  CHECK(split_sentences("It was 5 p.m. and late.").size() == 1);
  CHECK(split_sentences("Dr. J. Smith met Gen. Lee. They talked.").size() == 2);
  CHECK(split_sentences("He said \"Go.\" \"Now,\" she replied.").size() == 2);
  CHECK(split_sentences("Über alles. Ärger folgt.").size() == 2);
}

TEST_CASE("split_sentences: offsets index the source") {
  const std::string text = "  First one.  Second one!\nThird? ";
  const auto s = split_sentences(text);
  REQUIRE(s.size() == 3);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(text.substr(s.offsets[i].begin, s.offsets[i].size()) == s[i]);
  }
}

TEST_CASE("split_sentences: custom abbreviation list") {
  const auto none = AbbreviationSet::from_lines({});
  CHECK(split_sentences("Mr. Smith arrived.", none).size() == 2);
  const auto extra = AbbreviationSet::from_lines({"# comment", "", "approx."});
  CHECK(extra.size() == 1);
  CHECK(split_sentences("It is approx. Ten miles.", extra).size() == 1);
  CHECK(AbbreviationSet::defaults().contains("mr."));
}

TEST_CASE("tokenize") {
  CHECK(words("Hurricane Andrew headed west") ==
        std::vector<std::string>{"hurricane", "andrew", "headed", "west"});
  CHECK(words("165mph, gusting!") == std::vector<std::string>{"165mph", "gusting"});
  CHECK(words("").empty());
  CHECK(words("don't stop-gap 'quoted'") ==
        std::vector<std::string>{"don't", "stop-gap", "quoted"});
  CHECK(words("3.5 percent") == std::vector<std::string>{"3", "5", "percent"});
  CHECK(tokenize("a b a").count("a") == 2);
  CHECK(word_runs("Hello, World") == std::vector<std::string>{"Hello", "World"});
}

TEST_CASE("normalize_for_substring") {
  CHECK(normalize_for_substring("Hello   World\n") == "hello world");
  CHECK(normalize_for_substring("A  B") == normalize_for_substring("a b"));
  CHECK(normalize_for_substring("A-B") == "a-b");
  CHECK(normalize_for_substring("") == "");
}
