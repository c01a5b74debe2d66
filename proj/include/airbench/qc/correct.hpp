#pragma once

#include <algorithm>
#include <atomic>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "airbench/errors.hpp"
#include "airbench/generator/prompts.hpp"
#include "airbench/providers/provider.hpp"
#include "airbench/qc/action_matrix.hpp"
#include "airbench/qc/judge.hpp"
#include "airbench/qc/prelabel.hpp"
#include "airbench/qc/recall.hpp"
#include "airbench/qc/report.hpp"
#include "airbench/types.hpp"

namespace airbench::qc {

struct CorrectionOptions {
  int k = 1000;
  int threshold_hard_negative = 20;
  int threshold_other = 10;
  int workers = 8;
};

/// Everything decided for one query during label correction; replayable so
/// a restarted run can resume without re-querying providers.
struct QueryCorrection {
  std::string query_id;
  bool dropped = false;
  std::string drop_reason;
  struct Action {
    std::string doc_id;
    DocClass doc_class = DocClass::Type3Unlabeled;
    int llm_level = -1;  // -1: judging failed, treated as negative
    std::vector<RerankerVote> votes;
  };
  std::vector<Action> actions;
};

using CorrectionResume = std::map<std::string, QueryCorrection>;

/// Reconstructs completed per-query corrections from a QC report, for
/// resuming an interrupted run. Only queries with a terminal record
/// ("done" or "dropped") count as completed.
inline CorrectionResume resume_from_report(const QcReport& report) {
  CorrectionResume resume;
  std::map<std::string, QueryCorrection> partial;
  for (const QcRecord& record : report.records()) {
    if (record.action == "keep_query" || record.action == "discard_query") {
      continue;  // query-filter phase
    }
    QueryCorrection& qc = partial[record.query_id];
    qc.query_id = record.query_id;
    if (record.action == "done") {
      resume[record.query_id] = qc;
    } else if (record.action == "dropped") {
      qc.dropped = true;
      qc.drop_reason = record.reason;
      resume[record.query_id] = qc;
    } else {
      QueryCorrection::Action action;
      action.doc_id = record.doc_id;
      action.doc_class = doc_class_from_string(record.doc_class);
      action.llm_level = record.llm_level;
      for (const auto& [id, rank, vote] : record.votes) {
        action.votes.push_back(RerankerVote{id, rank, vote});
      }
      qc.actions.push_back(std::move(action));
    }
  }
  return resume;
}

/// The three-step label-correction pipeline, run for every query over the
/// searchable corpus D = seed ∪ D+ ∪ D-:
///   1. recall the top-k documents with the embedding model,
///   2. pre-label them by reranker vote (thresholds 20 / 10),
///   3. LLM-judge only the pre-positive documents and apply the action
///      table.
/// Per-query work runs in parallel; mutations are applied serially in query
/// order, so results do not depend on the worker count. Queries whose
/// providers fail unrecoverably are dropped with a reason code.
inline CandidateSets correct_labels(
    const CandidateSets& cands, const std::vector<Document>& seed_corpus,
    providers::EmbeddingProvider& embedder,
    const std::vector<providers::RerankProvider*>& rerankers,
    providers::ChatProvider& chat, const gen::PromptLibrary& prompts,
    const CorrectionOptions& options = {}, QcReport* report = nullptr,
    const CorrectionResume* resume = nullptr) {
  // Searchable corpus: seed first, then generated documents new to it.
  std::vector<Document> search_corpus = seed_corpus;
  std::unordered_set<std::string> seen;
  for (const Document& doc : seed_corpus) seen.insert(doc.id);
  for (const Document& doc : cands.positives) {
    if (seen.insert(doc.id).second) search_corpus.push_back(doc);
  }
  for (const Document& doc : cands.hard_negatives) {
    if (seen.insert(doc.id).second) search_corpus.push_back(doc);
  }
  std::unordered_map<std::string, const Document*> docs_by_id;
  for (const Document& doc : search_corpus) docs_by_id[doc.id] = &doc;

  std::unordered_set<std::string> hard_negative_ids;
  for (const Document& doc : cands.hard_negatives) {
    hard_negative_ids.insert(doc.id);
  }

  const EmbeddingIndex index(search_corpus, embedder, options.workers);

  const std::size_t n = cands.queries.size();
  std::vector<std::optional<QueryCorrection>> corrections(n);

  std::atomic<std::size_t> next{0};
  auto correct_one = [&](const Query& query) -> QueryCorrection {
    QueryCorrection result;
    result.query_id = query.id;
    RankedList recall;
    std::vector<PreLabel> labels;
    try {
      recall = recall_top_k(query, index, embedder, options.k);
      std::vector<std::string> doc_texts;
      doc_texts.reserve(recall.entries.size());
      for (const auto& [doc_id, score] : recall.entries) {
        doc_texts.push_back(docs_by_id.at(doc_id)->text);
      }
      labels = prelabel(recall, query, rerankers, doc_texts,
                        hard_negative_ids, options.threshold_hard_negative,
                        options.threshold_other);
    } catch (const ProviderError& e) {
      result.dropped = true;
      result.drop_reason = e.what();
      return result;
    }
    for (const PreLabel& label : labels) {
      if (!label.pre_positive) continue;
      QueryCorrection::Action action;
      action.doc_id = label.doc_id;
      action.doc_class = classify_doc(query, label.doc_id, cands);
      action.votes = label.votes;
      try {
        action.llm_level =
            judge_relevance(query.text, docs_by_id.at(label.doc_id)->text,
                            chat, prompts)
                .level;
      } catch (const ProviderError&) {
        action.llm_level = -1;  // treated as negative, logged
      }
      result.actions.push_back(std::move(action));
    }
    return result;
  };

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      const Query& query = cands.queries[i];
      if (resume != nullptr) {
        auto it = resume->find(query.id);
        if (it != resume->end()) {
          corrections[i] = it->second;
          continue;
        }
      }
      corrections[i] = correct_one(query);
    }
  };
  const int pool =
      std::max(1, std::min<int>(options.workers, static_cast<int>(n)));
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < pool; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }

  // Serial application in query order.
  CandidateSets state = cands;
  std::unordered_set<std::string> dropped_ids;
  for (std::size_t i = 0; i < n; ++i) {
    const Query& query = cands.queries[i];
    const QueryCorrection& correction = *corrections[i];
    const bool was_resumed =
        resume != nullptr && resume->count(query.id) != 0;
    if (correction.dropped) {
      dropped_ids.insert(query.id);
      if (report != nullptr && !was_resumed) {
        QcRecord record;
        record.query_id = query.id;
        record.action = "dropped";
        record.reason = correction.drop_reason;
        report->add(std::move(record));
      }
      continue;
    }
    for (const QueryCorrection::Action& action : correction.actions) {
      const bool llm_positive =
          action.llm_level >= 0 && RelevanceLevel{action.llm_level}.positive();
      auto doc_it = docs_by_id.find(action.doc_id);
      if (doc_it == docs_by_id.end()) {
        throw IntegrityError("corrected doc id not in searchable corpus: " +
                             action.doc_id);
      }
      const QcAction applied = apply_action_matrix(
          query, *doc_it->second, action.doc_class, llm_positive, state);
      if (report != nullptr && !was_resumed) {
        QcRecord record;
        record.query_id = query.id;
        record.doc_id = action.doc_id;
        record.doc_class = to_string(action.doc_class);
        record.llm_level = action.llm_level;
        for (const RerankerVote& vote : action.votes) {
          record.votes.emplace_back(vote.reranker_id, vote.rank, vote.vote);
        }
        record.action = to_string(applied);
        if (action.llm_level < 0) record.reason = "judging_error";
        report->add(std::move(record));
      }
    }
    if (report != nullptr && !was_resumed) {
      QcRecord record;
      record.query_id = query.id;
      record.action = "done";
      report->add(std::move(record));
    }
  }

  if (!dropped_ids.empty()) {
    std::erase_if(state.queries, [&](const Query& q) {
      return dropped_ids.count(q.id) != 0;
    });
    std::erase_if(state.pos_qrels, [&](const Qrel& qrel) {
      return dropped_ids.count(qrel.query_id) != 0;
    });
    std::erase_if(state.neg_qrels, [&](const Qrel& qrel) {
      return dropped_ids.count(qrel.query_id) != 0;
    });
    std::unordered_set<std::string> referenced_negatives;
    for (const Qrel& qrel : state.neg_qrels) {
      referenced_negatives.insert(qrel.doc_id);
    }
    std::erase_if(state.hard_negatives, [&](const Document& doc) {
      return referenced_negatives.count(doc.id) == 0;
    });
    std::unordered_set<std::string> referenced_positives;
    for (const Qrel& qrel : state.pos_qrels) {
      referenced_positives.insert(qrel.doc_id);
    }
    std::erase_if(state.positives, [&](const Document& doc) {
      return referenced_positives.count(doc.id) == 0;
    });
  }
  return state;
}

}  // namespace airbench::qc
