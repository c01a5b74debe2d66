#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <set>
#include <vector>

#include "airbench/rng.hpp"

using airbench::RngStream;

TEST_CASE("same seed and keys reproduce the stream") {
  RngStream a(42, 1, 2);
  RngStream b(42, 1, 2);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("different keys give different streams") {
  RngStream a(42, 1, 0);
  RngStream b(42, 2, 0);
  int equal = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() == b.next_u64()) ++equal;
  }
  CHECK(equal < 4);
}

TEST_CASE("bounded stays in range") {
  RngStream rng(7);
  for (int i = 0; i < 1000; ++i) CHECK(rng.bounded(13) < 13);
  CHECK_THROWS_AS(rng.bounded(0), airbench::ConfigError);
}

TEST_CASE("uniform_int covers its inclusive interval") {
  RngStream rng(7);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const auto v = rng.uniform_int(3, 7);
    CHECK(v >= 3);
    CHECK(v <= 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 5);
  CHECK(rng.uniform_int(4, 4) == 4);
}

TEST_CASE("degenerate categorical weights always pick the only option") {
  RngStream rng(11);
  const std::array<double, 4> weights{1, 0, 0, 0};
  for (int i = 0; i < 100; ++i) CHECK(rng.categorical(weights) == 0);
}

TEST_CASE("categorical rejects invalid weights") {
  RngStream rng(11);
  CHECK_THROWS_AS(rng.categorical(std::array<double, 2>{0, 0}),
                  airbench::ConfigError);
  CHECK_THROWS_AS(rng.categorical(std::array<double, 2>{-1, 2}),
                  airbench::ConfigError);
}

TEST_CASE("sample_without_replacement yields distinct indices") {
  RngStream rng(3);
  const auto picked = rng.sample_without_replacement(50, 20);
  CHECK(picked.size() == 20);
  const std::set<std::size_t> unique(picked.begin(), picked.end());
  CHECK(unique.size() == 20);
  for (std::size_t index : picked) CHECK(index < 50);
  CHECK_THROWS_AS(rng.sample_without_replacement(5, 6), airbench::ConfigError);
}
