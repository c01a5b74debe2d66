#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "airbench/errors.hpp"
#include "airbench/providers/provider.hpp"
#include "airbench/types.hpp"

namespace airbench::qc {

/// Frozen dense index: documents embedded once (parallel map), vectors
/// L2-normalized so cosine similarity is a dot product. Search is pure.
class EmbeddingIndex {
 public:
  EmbeddingIndex(const std::vector<Document>& docs,
                 providers::EmbeddingProvider& embedder, int workers = 1,
                 std::size_t batch_size = 64) {
    if (docs.empty()) throw ConfigError("EmbeddingIndex: empty corpus");
    doc_ids_.reserve(docs.size());
    for (const Document& doc : docs) doc_ids_.push_back(doc.id);
    vectors_.resize(docs.size());

    const std::size_t batches = (docs.size() + batch_size - 1) / batch_size;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;
    auto worker = [&] {
      for (;;) {
        const std::size_t b = next.fetch_add(1);
        if (b >= batches || failed.load()) return;
        const std::size_t begin = b * batch_size;
        const std::size_t end = std::min(begin + batch_size, docs.size());
        std::vector<std::string> texts;
        texts.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) texts.push_back(docs[i].text);
        try {
          auto embedded = embedder.embed(texts);
          if (embedded.size() != texts.size()) {
            throw ProviderError("embedding batch size mismatch");
          }
          for (std::size_t i = begin; i < end; ++i) {
            vectors_[i] = normalized(std::move(embedded[i - begin]));
          }
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          failed.store(true);
          failure = e.what();
          return;
        }
      }
    };
    const int pool = std::max(1, std::min<int>(workers, static_cast<int>(batches)));
    if (pool <= 1) {
      worker();
    } else {
      std::vector<std::thread> threads;
      for (int t = 0; t < pool; ++t) threads.emplace_back(worker);
      for (std::thread& t : threads) t.join();
    }
    if (failed.load()) {
      throw ProviderError("embedding index build failed: " + failure);
    }
    for (const auto& v : vectors_) {
      if (v.size() != vectors_.front().size()) {
        throw ProviderError("embedding dimensions differ across corpus");
      }
    }
  }

  std::size_t size() const { return doc_ids_.size(); }

  /// Top-k by cosine similarity against an already-embedded query vector;
  /// ties broken by ascending doc id.
  RankedList search_vector(const std::vector<double>& query_vector,
                           const std::string& query_id, int k) const {
    std::vector<double> q = normalized(query_vector);
    std::vector<std::size_t> idx(doc_ids_.size());
    std::vector<double> scores(doc_ids_.size());
    for (std::size_t i = 0; i < doc_ids_.size(); ++i) {
      idx[i] = i;
      scores[i] = dot(q, vectors_[i]);
    }
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      return doc_ids_[a] < doc_ids_[b];
    });
    RankedList list;
    list.query_id = query_id;
    const std::size_t take =
        std::min<std::size_t>(static_cast<std::size_t>(k), idx.size());
    for (std::size_t i = 0; i < take; ++i) {
      list.entries.emplace_back(doc_ids_[idx[i]], scores[idx[i]]);
    }
    return list;
  }

 private:
  static std::vector<double> normalized(std::vector<double> v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (double& x : v) x /= norm;
    }
    return v;
  }

  static double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double total = 0.0;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) total += a[i] * b[i];
    return total;
  }

  std::vector<std::string> doc_ids_;
  std::vector<std::vector<double>> vectors_;
};

/// Embeds the query and returns its top-k most similar documents.
inline RankedList recall_top_k(const Query& query, const EmbeddingIndex& index,
                               providers::EmbeddingProvider& embedder,
                               int k = 1000) {
  auto vectors = embedder.embed({query.text});
  if (vectors.size() != 1) {
    throw ProviderError("query embedding returned wrong count");
  }
  return index.search_vector(vectors[0], query.id, k);
}

}  // namespace airbench::qc
