#pragma once

#include <algorithm>
#include <atomic>
#include <map>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "airbench/errors.hpp"
#include "airbench/providers/provider.hpp"
#include "airbench/types.hpp"

namespace airbench::eval {

struct RerankOutcome {
  std::map<std::string, RankedList> runs;
  std::vector<std::string> failed_queries;  // kept their original ordering
};

/// The retrieval-then-rerank protocol: the top-`depth` entries of each
/// first-stage list are re-scored by the reranker and re-sorted (ties by
/// ascending doc id); entries beyond `depth` are dropped and the final
/// list keeps at most `k` entries. If the reranker fails for a query, that
/// query keeps its original top-`depth` ordering and is flagged. Queries
/// are processed under a bounded worker pool; results are merged by query
/// id, so the worker count never changes the outcome.
inline RerankOutcome rerank_eval(
    const std::map<std::string, RankedList>& first_stage,
    providers::RerankProvider& reranker,
    const std::unordered_map<std::string, std::string>& doc_texts,
    const std::unordered_map<std::string, std::string>& query_texts,
    int depth = 100, int k = 10, int workers = 8) {
  if (workers < 1) throw ConfigError("rerank_eval: workers must be >= 1");

  struct Job {
    const std::string* query_id;
    const RankedList* list;
  };
  std::vector<Job> jobs;
  jobs.reserve(first_stage.size());
  for (const auto& [query_id, list] : first_stage) {
    if (list.entries.empty()) {
      throw InputError("rerank_eval: empty first-stage list for " + query_id);
    }
    if (query_texts.find(query_id) == query_texts.end()) {
      throw InputError("rerank_eval: no text for query " + query_id);
    }
    for (const auto& [doc_id, score] : list.entries) {
      if (doc_texts.find(doc_id) == doc_texts.end()) {
        throw InputError("rerank_eval: no text for doc " + doc_id);
      }
    }
    jobs.push_back(Job{&query_id, &list});
  }

  std::vector<RankedList> results(jobs.size());
  std::vector<char> failed(jobs.size(), 0);

  auto rerank_one = [&](std::size_t j) {
    const std::string& query_id = *jobs[j].query_id;
    const RankedList& list = *jobs[j].list;
    RankedList top;
    top.query_id = query_id;
    const std::size_t take = std::min<std::size_t>(
        static_cast<std::size_t>(depth), list.entries.size());
    top.entries.assign(list.entries.begin(),
                       list.entries.begin() + static_cast<long>(take));

    std::vector<std::string> texts;
    texts.reserve(top.entries.size());
    for (const auto& [doc_id, score] : top.entries) {
      texts.push_back(doc_texts.at(doc_id));
    }

    RankedList reranked;
    reranked.query_id = query_id;
    try {
      const std::vector<double> scores =
          reranker.score(query_texts.at(query_id), texts);
      if (scores.size() != top.entries.size()) {
        throw ProviderError("rerank score count mismatch");
      }
      reranked.entries.reserve(top.entries.size());
      for (std::size_t i = 0; i < top.entries.size(); ++i) {
        reranked.entries.emplace_back(top.entries[i].first, scores[i]);
      }
      std::sort(reranked.entries.begin(), reranked.entries.end(),
                [](const auto& a, const auto& b) {
                  if (a.second != b.second) return a.second > b.second;
                  return a.first < b.first;
                });
    } catch (const ProviderError&) {
      failed[j] = 1;
      reranked = top;
    }
    if (reranked.entries.size() > static_cast<std::size_t>(k)) {
      reranked.entries.resize(static_cast<std::size_t>(k));
    }
    results[j] = std::move(reranked);
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      rerank_one(j);
    }
  };
  const int pool =
      std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < pool; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }

  RerankOutcome outcome;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (failed[j] != 0) outcome.failed_queries.push_back(*jobs[j].query_id);
    outcome.runs[*jobs[j].query_id] = std::move(results[j]);
  }
  return outcome;
}

}  // namespace airbench::eval
