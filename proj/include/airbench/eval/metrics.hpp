#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "airbench/errors.hpp"
#include "airbench/types.hpp"

namespace airbench::eval {

enum class Metric { NdcgAtK, RecallAtK };

inline std::string to_string(Metric metric, int k) {
  return (metric == Metric::NdcgAtK ? "nDCG@" : "Recall@") + std::to_string(k);
}

/// Binary-gain nDCG@k with 1/log2(rank+1) discounts (trec_eval convention).
/// Returns nullopt when the query has no positives (such queries are
/// excluded from means rather than scored).
inline std::optional<double> ndcg_at_k(
    const RankedList& run, const std::set<std::string>& positive_ids,
    int k = 10) {
  const std::size_t p = positive_ids.size();
  if (p == 0) return std::nullopt;
  double dcg = 0.0;
  const std::size_t depth =
      std::min<std::size_t>(static_cast<std::size_t>(k), run.entries.size());
  for (std::size_t i = 0; i < depth; ++i) {
    if (positive_ids.count(run.entries[i].first) != 0) {
      dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    }
  }
  double idcg = 0.0;
  const std::size_t ideal = std::min<std::size_t>(static_cast<std::size_t>(k), p);
  for (std::size_t i = 0; i < ideal; ++i) {
    idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  }
  return dcg / idcg;
}

/// Fraction of the query's positives found in the top k.
inline std::optional<double> recall_at_k(
    const RankedList& run, const std::set<std::string>& positive_ids,
    int k = 10) {
  const std::size_t p = positive_ids.size();
  if (p == 0) return std::nullopt;
  const std::size_t depth =
      std::min<std::size_t>(static_cast<std::size_t>(k), run.entries.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < depth; ++i) {
    if (positive_ids.count(run.entries[i].first) != 0) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(p);
}

struct MetricReport {
  Metric metric = Metric::NdcgAtK;
  int k = 10;
  std::map<std::string, double> per_query;
  double mean = 0.0;
  // Queries in the selected split that the run did not cover (scored 0).
  std::vector<std::string> missing_queries;
  // Queries excluded from the mean for lacking positives.
  std::vector<std::string> skipped_queries;
  std::size_t unknown_doc_entries = 0;
};

enum class SplitSelector { Dev, Test, All };

inline SplitSelector split_selector_from_string(const std::string& s) {
  if (s == "dev") return SplitSelector::Dev;
  if (s == "test") return SplitSelector::Test;
  if (s == "all") return SplitSelector::All;
  throw ConfigError("unknown split selector: " + s);
}

/// Scores a run against a bundle: nDCG@10 for QA, Recall@10 for Long-Doc.
/// Run entries pointing at documents outside the bundle corpus are dropped
/// (counted as warnings); queries missing from the run score 0.
inline MetricReport evaluate_run(
    const std::map<std::string, RankedList>& runs, const DatasetBundle& bundle,
    Task task, SplitSelector selector = SplitSelector::All, int k = 10) {
  MetricReport report;
  report.metric = task == Task::QA ? Metric::NdcgAtK : Metric::RecallAtK;
  report.k = k;

  std::unordered_set<std::string> corpus_ids;
  for (const Document& doc : bundle.corpus) corpus_ids.insert(doc.id);
  std::map<std::string, std::set<std::string>> positives;
  for (const Qrel& qrel : bundle.qrels) {
    if (qrel.relevance == 1) positives[qrel.query_id].insert(qrel.doc_id);
  }

  double total = 0.0;
  std::size_t counted = 0;
  for (const Query& query : bundle.queries) {
    if (selector != SplitSelector::All) {
      auto it = bundle.split.find(query.id);
      const SplitKind want =
          selector == SplitSelector::Dev ? SplitKind::Dev : SplitKind::Test;
      if (it == bundle.split.end() || it->second != want) continue;
    }
    const std::set<std::string>& pos = positives[query.id];
    if (pos.empty()) {
      report.skipped_queries.push_back(query.id);
      continue;
    }
    RankedList cleaned;
    cleaned.query_id = query.id;
    auto run_it = runs.find(query.id);
    if (run_it == runs.end()) {
      report.missing_queries.push_back(query.id);
    } else {
      for (const auto& entry : run_it->second.entries) {
        if (corpus_ids.count(entry.first) == 0) {
          ++report.unknown_doc_entries;
          continue;
        }
        cleaned.entries.push_back(entry);
      }
    }
    const std::optional<double> value =
        report.metric == Metric::NdcgAtK ? ndcg_at_k(cleaned, pos, k)
                                         : recall_at_k(cleaned, pos, k);
    report.per_query[query.id] = value.value_or(0.0);
    total += value.value_or(0.0);
    ++counted;
  }
  report.mean = counted == 0 ? 0.0 : total / static_cast<double>(counted);
  return report;
}

}  // namespace airbench::eval
