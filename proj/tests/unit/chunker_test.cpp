#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "airbench/corpus/chunker.hpp"
#include "support/fixtures.hpp"

using airbench::Tokenizer;
using airbench::corpus::chunk_long_document;
using airbench::corpus::expected_chunk_count;

TEST_CASE("500 tokens with chunk_size=200 overlap=50 gives windows at 0/150/300") {
  const Tokenizer tok;
  const std::string text = fixtures::numbered_token_text(500);
  const auto chunks = chunk_long_document("doc", "", text, 200, 50, tok);
  REQUIRE(chunks.size() == 3);
  // stride-150 windows enumerated by hand
  CHECK(tok.tokenize(chunks[0].text).front() == "t0");
  CHECK(tok.tokenize(chunks[0].text).back() == "t199");
  CHECK(tok.tokenize(chunks[1].text).front() == "t150");
  CHECK(tok.tokenize(chunks[1].text).back() == "t349");
  CHECK(tok.tokenize(chunks[2].text).front() == "t300");
  CHECK(tok.tokenize(chunks[2].text).back() == "t499");
  for (const auto& chunk : chunks) {
    CHECK(chunk.origin == airbench::DocOrigin::LongDocChunk);
    CHECK(chunk.source_meta.at("parent_id") == "doc");
  }
  CHECK(chunks[1].id == "doc-chunk-1");
}

TEST_CASE("text shorter than one chunk comes back whole") {
  const Tokenizer tok;
  const std::string text = fixtures::numbered_token_text(100);
  const auto chunks = chunk_long_document("doc", "", text, 200, 50, tok);
  REQUIRE(chunks.size() == 1);
  CHECK(chunks[0].text == text);
}

TEST_CASE("exact fit produces no second window") {
  const Tokenizer tok;
  const std::string text = fixtures::numbered_token_text(200);
  CHECK(chunk_long_document("doc", "", text, 200, 50, tok).size() == 1);
}

TEST_CASE("invalid chunking inputs are rejected") {
  const Tokenizer tok;
  CHECK_THROWS_AS(chunk_long_document("doc", "", "text", 50, 50, tok),
                  airbench::ConfigError);
  CHECK_THROWS_AS(chunk_long_document("doc", "", "text", 50, 80, tok),
                  airbench::ConfigError);
  CHECK_THROWS_AS(chunk_long_document("doc", "", "", 200, 50, tok),
                  airbench::InputError);
}

TEST_CASE("chunk count, coverage, and overlap hold for random lengths") {
  const Tokenizer tok;
  std::mt19937 rng(99);
  for (int round = 0; round < 100; ++round) {
    const std::size_t total = 1 + rng() % 5000;
    const std::string text = fixtures::numbered_token_text(total);
    const auto chunks = chunk_long_document("doc", "", text, 200, 50, tok);

    CHECK(chunks.size() == expected_chunk_count(total, 200, 50));

    // enumeration oracle: every token index covered, bounded multiplicity
    std::vector<int> appearances(total, 0);
    for (const auto& chunk : chunks) {
      const auto tokens = tok.tokenize(chunk.text);
      CHECK(tokens.size() <= 200);
      const std::size_t first =
          std::stoul(tokens.front().substr(1));
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        REQUIRE(tokens[i] == "t" + std::to_string(first + i));
        ++appearances[first + i];
      }
    }
    const int max_multiplicity = (200 + 149) / 150;  // ceil(cs / stride)
    for (std::size_t i = 0; i < total; ++i) {
      CHECK(appearances[i] >= 1);
      CHECK(appearances[i] <= max_multiplicity);
    }

    // consecutive chunks share exactly `overlap` tokens
    for (std::size_t c = 1; c < chunks.size(); ++c) {
      const auto prev = tok.tokenize(chunks[c - 1].text);
      const auto cur = tok.tokenize(chunks[c].text);
      const std::size_t prev_first = std::stoul(prev.front().substr(1));
      const std::size_t cur_first = std::stoul(cur.front().substr(1));
      const std::size_t prev_end = prev_first + prev.size();
      CHECK(prev_end - cur_first == 50);
    }
  }
}
