#pragma once

#include <algorithm>
#include <atomic>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "airbench/errors.hpp"
#include "airbench/generator/prompts.hpp"
#include "airbench/providers/provider.hpp"
#include "airbench/qc/judge.hpp"
#include "airbench/qc/report.hpp"
#include "airbench/types.hpp"

namespace airbench::qc {

/// Bookkeeping core of query removal: keeps exactly the queries in
/// `kept_ids`, drops all relevance labels of removed queries, and drops
/// documents no remaining label references.
inline CandidateSets retain_queries(
    const CandidateSets& cands,
    const std::unordered_set<std::string>& kept_ids) {
  CandidateSets out;
  for (const Query& query : cands.queries) {
    if (kept_ids.count(query.id) != 0) out.queries.push_back(query);
  }
  std::unordered_set<std::string> kept_positive_ids;
  for (const Qrel& qrel : cands.pos_qrels) {
    if (kept_ids.count(qrel.query_id) != 0) {
      out.pos_qrels.push_back(qrel);
      kept_positive_ids.insert(qrel.doc_id);
    }
  }
  for (const Document& doc : cands.positives) {
    if (kept_positive_ids.count(doc.id) != 0) out.positives.push_back(doc);
  }
  std::unordered_set<std::string> kept_negative_ids;
  for (const Qrel& qrel : cands.neg_qrels) {
    if (kept_ids.count(qrel.query_id) != 0) {
      out.neg_qrels.push_back(qrel);
      kept_negative_ids.insert(qrel.doc_id);
    }
  }
  for (const Document& doc : cands.hard_negatives) {
    if (kept_negative_ids.count(doc.id) != 0) out.hard_negatives.push_back(doc);
  }
  return out;
}

/// Judges every query against its positive document and discards the
/// negatively judged ones, together with all their relevance labels and the
/// hard negatives those labels orphan. A query whose judgment errors out is
/// discarded conservatively.
inline CandidateSets filter_low_quality_queries(
    const CandidateSets& cands, providers::ChatProvider& chat,
    const gen::PromptLibrary& prompts, QcReport* report = nullptr,
    int workers = 1) {
  std::unordered_map<std::string, const Document*> positives_by_id;
  for (const Document& doc : cands.positives) positives_by_id[doc.id] = &doc;

  const std::size_t n = cands.queries.size();
  std::vector<const Document*> positive_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = positives_by_id.find(cands.queries[i].positive_doc_id);
    if (it == positives_by_id.end()) {
      throw IntegrityError("query " + cands.queries[i].id +
                           " has no positive document in the candidate sets");
    }
    positive_of[i] = it->second;
  }

  // level of each query's positive; nullopt = judging error
  std::vector<std::optional<int>> levels(n);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        levels[i] =
            judge_relevance(cands.queries[i], *positive_of[i], chat, prompts)
                .level;
      } catch (const ProviderError&) {
        levels[i] = std::nullopt;
      }
    }
  };
  const int pool = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < pool; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }

  std::unordered_set<std::string> kept_ids;
  for (std::size_t i = 0; i < n; ++i) {
    const Query& query = cands.queries[i];
    const bool keep =
        levels[i].has_value() && RelevanceLevel{*levels[i]}.positive();
    if (report != nullptr) {
      QcRecord record;
      record.query_id = query.id;
      record.doc_id = query.positive_doc_id;
      record.llm_level = levels[i].value_or(-1);
      record.action = keep ? "keep_query" : "discard_query";
      if (!levels[i].has_value()) record.reason = "judging_error";
      report->add(std::move(record));
    }
    if (keep) kept_ids.insert(query.id);
  }
  return retain_queries(cands, kept_ids);
}

}  // namespace airbench::qc
