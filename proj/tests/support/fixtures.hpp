#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "airbench/providers/provider.hpp"
#include "airbench/types.hpp"

namespace fixtures {

// Chat provider backed by a plain function; handy for scripting replies
// keyed off prompt content.
class FnChatProvider : public airbench::providers::ChatProvider {
 public:
  using Fn = std::function<std::string(const std::string&)>;
  explicit FnChatProvider(Fn fn) : fn_(std::move(fn)) {}

  std::string complete(const std::string& prompt,
                       const airbench::providers::ChatParams&) override {
    return fn_(prompt);
  }

 private:
  Fn fn_;
};

class FnEmbeddingProvider : public airbench::providers::EmbeddingProvider {
 public:
  using Fn = std::function<std::vector<double>(const std::string&)>;
  explicit FnEmbeddingProvider(Fn fn) : fn_(std::move(fn)) {}

  std::vector<std::vector<double>> embed(
      const std::vector<std::string>& texts) override {
    std::vector<std::vector<double>> vectors;
    for (const std::string& text : texts) vectors.push_back(fn_(text));
    return vectors;
  }

 private:
  Fn fn_;
};

class FnRerankProvider : public airbench::providers::RerankProvider {
 public:
  using Fn = std::function<double(const std::string&, const std::string&)>;
  FnRerankProvider(std::string id, Fn fn) : id_(std::move(id)), fn_(std::move(fn)) {}

  std::vector<double> score(const std::string& query,
                            const std::vector<std::string>& docs) override {
    std::vector<double> scores;
    for (const std::string& doc : docs) scores.push_back(fn_(query, doc));
    return scores;
  }

  std::string id() const override { return id_; }

 private:
  std::string id_;
  Fn fn_;
};

// Always fails, optionally transiently.
class FailingReranker : public airbench::providers::RerankProvider {
 public:
  explicit FailingReranker(std::string id = "failing") : id_(std::move(id)) {}
  std::vector<double> score(const std::string&,
                            const std::vector<std::string>&) override {
    throw airbench::ProviderError("scripted failure");
  }
  std::string id() const override { return id_; }

 private:
  std::string id_;
};

inline const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> words{
      "alpha",  "bridge", "carbon", "delta",   "ember",   "forest", "glacier",
      "harbor", "island", "jungle", "kernel",  "lantern", "meadow", "nebula",
      "orbit",  "prairie", "quartz", "river",  "summit",  "tundra", "umbra",
      "valley", "willow", "xenon",  "yonder",  "zephyr",  "basalt", "cirrus",
      "domain", "estuary"};
  return words;
}

// Deterministic synthetic document: `n_tokens` words drawn from the fixture
// vocabulary with an std::mt19937 seeded per id (independent of the
// library's RNG machinery).
inline airbench::Document make_doc(const std::string& id, std::size_t n_tokens,
                                   std::uint32_t seed) {
  std::mt19937 rng(seed);
  const auto& words = vocabulary();
  std::ostringstream text;
  for (std::size_t i = 0; i < n_tokens; ++i) {
    if (i > 0) text << ' ';
    text << words[rng() % words.size()];
  }
  airbench::Document doc;
  doc.id = id;
  doc.title = "title " + id;
  doc.text = text.str();
  return doc;
}

inline std::vector<airbench::Document> make_corpus(std::size_t n_docs,
                                                   std::size_t tokens_per_doc,
                                                   std::uint32_t seed) {
  std::vector<airbench::Document> docs;
  docs.reserve(n_docs);
  for (std::size_t i = 0; i < n_docs; ++i) {
    docs.push_back(make_doc("d" + std::to_string(i), tokens_per_doc,
                            seed + static_cast<std::uint32_t>(i)));
  }
  return docs;
}

// Text of exactly n distinct tokens t0 t1 ... t(n-1); chunk windows over it
// are easy to enumerate by hand.
inline std::string numbered_token_text(std::size_t n) {
  std::ostringstream text;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) text << ' ';
    text << 't' << i;
  }
  return text.str();
}

inline std::filesystem::path fresh_temp_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("airbench_test_" + tag + "_" +
                    std::to_string(std::random_device{}()));
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace fixtures
