#pragma once

#include <algorithm>
#include <string>
#include <unordered_set>
#include <vector>

#include "airbench/errors.hpp"
#include "airbench/providers/provider.hpp"
#include "airbench/types.hpp"

namespace airbench::qc {

struct RerankerVote {
  std::string reranker_id;
  int rank = 0;  // 1-based position in that reranker's re-ordered list
  bool vote = false;
};

struct PreLabel {
  std::string doc_id;
  std::vector<RerankerVote> votes;
  bool pre_positive = false;
};

/// Re-ranks the recall list with every reranker and derives per-document
/// votes: a reranker votes positive when it places the document at a rank
/// no worse than the applicable threshold (20 for hard negatives, 10
/// otherwise). A document is pre-positive when a strict majority of the
/// responding rerankers vote positive; a failing reranker abstains.
inline std::vector<PreLabel> prelabel(
    const RankedList& recall_list, const Query& query,
    const std::vector<providers::RerankProvider*>& rerankers,
    const std::vector<std::string>& doc_texts,
    const std::unordered_set<std::string>& hard_negative_ids,
    int threshold_hard_negative = 20, int threshold_other = 10) {
  if (rerankers.empty()) throw ConfigError("prelabel: no rerankers given");
  if (recall_list.entries.empty()) {
    throw InputError("prelabel: recall list is empty");
  }
  if (doc_texts.size() != recall_list.entries.size()) {
    throw InputError("prelabel: doc_texts misaligned with recall list");
  }

  const std::size_t n = recall_list.entries.size();
  std::vector<PreLabel> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i].doc_id = recall_list.entries[i].first;
  }

  int responders = 0;
  std::vector<int> positive_votes(n, 0);
  for (providers::RerankProvider* reranker : rerankers) {
    std::vector<double> scores;
    try {
      scores = reranker->score(query.text, doc_texts);
    } catch (const ProviderError&) {
      continue;  // abstain
    }
    if (scores.size() != n) continue;
    ++responders;

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      return recall_list.entries[a].first < recall_list.entries[b].first;
    });
    std::vector<int> rank_of(n, 0);
    for (std::size_t pos = 0; pos < n; ++pos) {
      rank_of[order[pos]] = static_cast<int>(pos) + 1;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const bool is_hard_negative =
          hard_negative_ids.count(recall_list.entries[i].first) != 0;
      const int threshold =
          is_hard_negative ? threshold_hard_negative : threshold_other;
      RerankerVote vote;
      vote.reranker_id = reranker->id();
      vote.rank = rank_of[i];
      vote.vote = rank_of[i] <= threshold;
      if (vote.vote) ++positive_votes[i];
      labels[i].votes.push_back(std::move(vote));
    }
  }
  if (responders == 0) {
    throw ProviderError("prelabel: every reranker failed for query " +
                        query.id);
  }
  for (std::size_t i = 0; i < n; ++i) {
    labels[i].pre_positive = 2 * positive_votes[i] > responders;
  }
  return labels;
}

}  // namespace airbench::qc
