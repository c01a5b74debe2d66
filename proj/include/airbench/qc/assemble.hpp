#pragma once

#include <algorithm>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "airbench/errors.hpp"
#include "airbench/types.hpp"

namespace airbench::qc {

namespace detail {

inline bool is_blank(const std::string& text) {
  for (char c : text) {
    if (c != ' ' && c != '\t' && c != '\r' && c != '\n') return false;
  }
  return true;
}

}  // namespace detail

/// Checks every bundle invariant; throws IntegrityError listing the
/// offenders.
inline void validate_bundle(const DatasetBundle& bundle) {
  std::vector<std::string> problems;
  std::unordered_set<std::string> doc_ids;
  for (const Document& doc : bundle.corpus) {
    if (!doc_ids.insert(doc.id).second) {
      problems.push_back("duplicate doc id: " + doc.id);
    }
    if (detail::is_blank(doc.text)) {
      problems.push_back("blank document text: " + doc.id);
    }
  }
  std::unordered_set<std::string> query_ids;
  for (const Query& query : bundle.queries) {
    if (!query_ids.insert(query.id).second) {
      problems.push_back("duplicate query id: " + query.id);
    }
    if (detail::is_blank(query.text)) {
      problems.push_back("blank query text: " + query.id);
    }
  }
  std::unordered_set<std::string> has_positive;
  std::unordered_set<std::string> qrel_keys;
  for (const Qrel& qrel : bundle.qrels) {
    if (!qrel_keys.insert(qrel.query_id + "\t" + qrel.doc_id).second) {
      problems.push_back("duplicate qrel: (" + qrel.query_id + ", " +
                         qrel.doc_id + ")");
    }
    if (query_ids.count(qrel.query_id) == 0) {
      problems.push_back("qrel references unknown query: " + qrel.query_id);
    }
    if (doc_ids.count(qrel.doc_id) == 0) {
      problems.push_back("qrel references unknown doc: " + qrel.doc_id);
    }
    if (qrel.relevance != 0 && qrel.relevance != 1) {
      problems.push_back("non-binary qrel for (" + qrel.query_id + ", " +
                         qrel.doc_id + ")");
    }
    if (qrel.relevance == 1) has_positive.insert(qrel.query_id);
  }
  for (const Query& query : bundle.queries) {
    if (has_positive.count(query.id) == 0) {
      problems.push_back("query has no positive qrel: " + query.id);
    }
  }
  for (const Query& query : bundle.queries) {
    if (bundle.split.count(query.id) == 0) {
      problems.push_back("query missing from split: " + query.id);
    }
  }
  for (const auto& [query_id, kind] : bundle.split) {
    if (query_ids.count(query_id) == 0) {
      problems.push_back("split references unknown query: " + query_id);
    }
  }
  if (!problems.empty()) {
    std::string message = "bundle validation failed:";
    const std::size_t show = std::min<std::size_t>(problems.size(), 20);
    for (std::size_t i = 0; i < show; ++i) message += "\n  - " + problems[i];
    if (problems.size() > show) {
      message += "\n  ... and " + std::to_string(problems.size() - show) +
                 " more";
    }
    throw IntegrityError(message);
  }
}

/// Unions the seed corpus with the surviving generated documents
/// (id-deduplicated, seed copy wins) and packages the final bundle.
inline DatasetBundle assemble_dataset(const std::vector<Document>& seed_corpus,
                                      const CandidateSets& cands,
                                      const SplitAssignment& split) {
  DatasetBundle bundle;
  bundle.corpus = seed_corpus;
  std::unordered_set<std::string> seen;
  for (const Document& doc : seed_corpus) seen.insert(doc.id);
  for (const Document& doc : cands.positives) {
    if (seen.insert(doc.id).second) bundle.corpus.push_back(doc);
  }
  for (const Document& doc : cands.hard_negatives) {
    if (seen.insert(doc.id).second) bundle.corpus.push_back(doc);
  }
  bundle.queries = cands.queries;
  bundle.qrels = cands.pos_qrels;
  bundle.qrels.insert(bundle.qrels.end(), cands.neg_qrels.begin(),
                      cands.neg_qrels.end());
  bundle.split = split;
  validate_bundle(bundle);
  return bundle;
}

}  // namespace airbench::qc
