#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "airbench/errors.hpp"
#include "airbench/tokenizer.hpp"
#include "airbench/types.hpp"

namespace airbench::eval {

/// Okapi BM25 inverted index. Scoring follows
///   score(q,d) = sum over query tokens t of
///     IDF(t) * tf / (tf + k1 * (1 - b + b * dl/avgdl)),
///   IDF(t) = ln(1 + (N - n_t + 0.5) / (n_t + 0.5)),
/// with k1 = 0.9, b = 0.4 by default. Query tokens contribute once per
/// occurrence; ties in the result list are broken by ascending doc id.
struct Bm25Index {
  double k1 = 0.9;
  double b = 0.4;
  double avgdl = 0.0;
  std::vector<std::string> doc_ids;
  std::vector<std::uint32_t> doc_lengths;
  // term -> (doc index, term frequency), doc indices ascending
  std::map<std::string, std::vector<std::pair<std::uint32_t, std::uint32_t>>>
      postings;
  std::string tokenizer_name = "unicode";

  std::size_t doc_count() const { return doc_ids.size(); }
};

inline Bm25Index bm25_build(const std::vector<Document>& corpus,
                            const Tokenizer& tokenizer, double k1 = 0.9,
                            double b = 0.4) {
  if (corpus.empty()) throw ConfigError("bm25_build: empty corpus");
  Bm25Index index;
  index.k1 = k1;
  index.b = b;
  index.tokenizer_name = tokenizer.name();
  index.doc_ids.reserve(corpus.size());
  index.doc_lengths.reserve(corpus.size());
  std::uint64_t total_length = 0;
  for (std::uint32_t i = 0; i < corpus.size(); ++i) {
    const std::vector<std::string> tokens = tokenizer.tokenize(corpus[i].text);
    index.doc_ids.push_back(corpus[i].id);
    index.doc_lengths.push_back(static_cast<std::uint32_t>(tokens.size()));
    total_length += tokens.size();
    std::map<std::string, std::uint32_t> tf;
    for (const std::string& token : tokens) ++tf[token];
    for (const auto& [term, count] : tf) {
      index.postings[term].emplace_back(i, count);
    }
  }
  index.avgdl = static_cast<double>(total_length) /
                static_cast<double>(corpus.size());
  return index;
}

inline RankedList bm25_search(const Bm25Index& index,
                              const std::string& query_id,
                              const std::string& query_text,
                              const Tokenizer& tokenizer, int k = 100) {
  RankedList result;
  result.query_id = query_id;
  const std::vector<std::string> tokens = tokenizer.tokenize(query_text);
  if (tokens.empty()) return result;

  const double n_docs = static_cast<double>(index.doc_count());
  std::unordered_map<std::uint32_t, double> scores;
  for (const std::string& token : tokens) {
    auto it = index.postings.find(token);
    if (it == index.postings.end()) continue;
    const double n_t = static_cast<double>(it->second.size());
    const double idf = std::log(1.0 + (n_docs - n_t + 0.5) / (n_t + 0.5));
    for (const auto& [doc, tf_raw] : it->second) {
      const double tf = static_cast<double>(tf_raw);
      const double dl = static_cast<double>(index.doc_lengths[doc]);
      const double denom =
          tf + index.k1 * (1.0 - index.b + index.b * dl / index.avgdl);
      scores[doc] += idf * tf / denom;
    }
  }
  if (scores.empty()) return result;

  std::vector<std::pair<std::uint32_t, double>> scored(scores.begin(),
                                                       scores.end());
  std::sort(scored.begin(), scored.end(),
            [&](const auto& a, const auto& b_) {
              if (a.second != b_.second) return a.second > b_.second;
              return index.doc_ids[a.first] < index.doc_ids[b_.first];
            });
  const std::size_t take =
      std::min<std::size_t>(static_cast<std::size_t>(k), scored.size());
  for (std::size_t i = 0; i < take; ++i) {
    result.entries.emplace_back(index.doc_ids[scored[i].first],
                                scored[i].second);
  }
  return result;
}

// --- index persistence (CLI `bm25 index` / `bm25 search`) -------------------

inline void save_bm25_index(const Bm25Index& index,
                            const std::filesystem::path& path) {
  nlohmann::json j;
  j["k1"] = index.k1;
  j["b"] = index.b;
  j["avgdl"] = index.avgdl;
  j["doc_ids"] = index.doc_ids;
  j["doc_lengths"] = index.doc_lengths;
  j["tokenizer"] = index.tokenizer_name;
  nlohmann::json postings = nlohmann::json::object();
  for (const auto& [term, list] : index.postings) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [doc, tf] : list) entries.push_back({doc, tf});
    postings[term] = std::move(entries);
  }
  j["postings"] = std::move(postings);
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write index: " + path.string());
  out << j.dump();
}

inline Bm25Index load_bm25_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read index: " + path.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw InputError("index file is not valid JSON");
  Bm25Index index;
  index.k1 = j.at("k1").get<double>();
  index.b = j.at("b").get<double>();
  index.avgdl = j.at("avgdl").get<double>();
  index.doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
  index.doc_lengths = j.at("doc_lengths").get<std::vector<std::uint32_t>>();
  index.tokenizer_name = j.value("tokenizer", std::string("unicode"));
  for (const auto& [term, entries] : j.at("postings").items()) {
    auto& list = index.postings[term];
    for (const auto& entry : entries) {
      list.emplace_back(entry.at(0).get<std::uint32_t>(),
                        entry.at(1).get<std::uint32_t>());
    }
  }
  return index;
}

}  // namespace airbench::eval
