#include <catch2/catch_amalgamated.hpp>

#include <cctype>
#include <random>
#include <string>

#include "airbench/tokenizer.hpp"
#include "support/oracles.hpp"

using airbench::Tokenizer;

namespace {

// Independent ASCII re-tokenization: count maximal alphanumeric runs.
std::size_t count_alnum_runs(const std::string& text) {
  std::size_t count = 0;
  bool in_token = false;
  for (unsigned char c : text) {
    const bool is_token = std::isalnum(c) != 0;
    if (is_token && !in_token) ++count;
    in_token = is_token;
  }
  return count;
}

}  // namespace

TEST_CASE("whitespace tokenizer counts delimiter-separated tokens") {
  const Tokenizer tok("whitespace");
  CHECK(airbench::count_tokens("a b c", tok) == 3);
  CHECK(airbench::count_tokens("", tok) == 0);
  CHECK(tok.count("   ") == 0);
  CHECK(tok.tokenize("Hello, World!") ==
        std::vector<std::string>{"hello,", "world!"});
}

TEST_CASE("unicode tokenizer splits on punctuation and whitespace") {
  const Tokenizer tok;
  CHECK(tok.count("") == 0);
  CHECK(tok.tokenize("Hello, world!") ==
        std::vector<std::string>{"hello", "world"});
  CHECK(tok.tokenize("state-of-the-art") ==
        std::vector<std::string>{"state", "of", "the", "art"});
  CHECK(tok.tokenize("caf\xc3\xa9 bar") ==
        std::vector<std::string>{"caf\xc3\xa9", "bar"});
  // fullwidth comma splits, ideographs stay together
  CHECK(tok.count("\xe6\x96\x87\xe6\xa1\xa3\xef\xbc\x8c\xe6\xa3\x80\xe7\xb4\xa2") == 2);
}

TEST_CASE("tokenization is deterministic") {
  const Tokenizer tok;
  const std::string text = "The quick brown fox; jumps over 42 lazy dogs.";
  CHECK(tok.tokenize(text) == tok.tokenize(text));
  CHECK(tok.count(text) == tok.tokenize(text).size());
}

TEST_CASE("random ASCII text matches an independent tokenization pass") {
  std::mt19937 rng(7);
  const std::string alphabet =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 .,;:!?-()";
  const Tokenizer tok;
  for (int round = 0; round < 20; ++round) {
    std::string text;
    for (int i = 0; i < 1000; ++i) {
      text += alphabet[rng() % alphabet.size()];
    }
    CHECK(tok.count(text) == count_alnum_runs(text));
  }
}

TEST_CASE("token spans reconstruct the tokens") {
  const Tokenizer tok;
  const std::string text = "alpha, beta -- gamma!";
  const auto spans = tok.token_spans(text);
  REQUIRE(spans.size() == 3);
  CHECK(text.substr(spans[0].begin, spans[0].end - spans[0].begin) == "alpha");
  CHECK(text.substr(spans[2].begin, spans[2].end - spans[2].begin) == "gamma");
}

TEST_CASE("unknown tokenizer name is a config error") {
  CHECK_THROWS_AS(Tokenizer("bpe"), airbench::ConfigError);
}

TEST_CASE("token_set_jaccard matches a set-based oracle") {
  const Tokenizer tok;
  CHECK(airbench::token_set_jaccard("a b c", "a b c", tok) == 1.0);
  CHECK(airbench::token_set_jaccard("a b", "c d", tok) == 0.0);
  const std::string a = "river summit forest river";
  const std::string b = "forest glacier summit harbor";
  CHECK_THAT(airbench::token_set_jaccard(a, b, tok),
             Catch::Matchers::WithinAbs(
                 oracle::token_set_jaccard(tok.tokenize(a), tok.tokenize(b)),
                 1e-12));
}
