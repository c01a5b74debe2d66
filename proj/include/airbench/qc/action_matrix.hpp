#pragma once

#include <algorithm>
#include <string>

#include "airbench/errors.hpp"
#include "airbench/types.hpp"

namespace airbench::qc {

/// How a judged document relates to the query's stage-2 labels:
///   Type 1 - the query's original positive ((q, d, 1) in R+),
///   Type 2 - a hard negative generated for the query ((q, d, 0) in R-),
///   Type 3 - no label for (q, d) in the candidate sets.
enum class DocClass { Type1OriginalPositive, Type2HardNegative, Type3Unlabeled };

inline std::string to_string(DocClass c) {
  switch (c) {
    case DocClass::Type1OriginalPositive: return "type1";
    case DocClass::Type2HardNegative: return "type2";
    case DocClass::Type3Unlabeled: return "type3";
  }
  return "type3";
}

inline DocClass doc_class_from_string(const std::string& s) {
  if (s == "type1") return DocClass::Type1OriginalPositive;
  if (s == "type2") return DocClass::Type2HardNegative;
  if (s == "type3") return DocClass::Type3Unlabeled;
  throw ConfigError("unknown doc class: " + s);
}

enum class QcAction { Skip, RemoveFalseNegative, AddNewPositive, IntegrityFlag };

inline std::string to_string(QcAction a) {
  switch (a) {
    case QcAction::Skip: return "skip";
    case QcAction::RemoveFalseNegative: return "remove_false_negative";
    case QcAction::AddNewPositive: return "add_new_positive";
    case QcAction::IntegrityFlag: return "integrity_flag";
  }
  return "skip";
}

inline QcAction qc_action_from_string(const std::string& s) {
  if (s == "skip") return QcAction::Skip;
  if (s == "remove_false_negative") return QcAction::RemoveFalseNegative;
  if (s == "add_new_positive") return QcAction::AddNewPositive;
  if (s == "integrity_flag") return QcAction::IntegrityFlag;
  throw ConfigError("unknown qc action: " + s);
}

/// Classifies (query, doc) against the stage-2 labels in `state`.
inline DocClass classify_doc(const Query& query, const std::string& doc_id,
                             const CandidateSets& state) {
  for (const Qrel& qrel : state.pos_qrels) {
    if (qrel.query_id == query.id && qrel.doc_id == doc_id) {
      return DocClass::Type1OriginalPositive;
    }
  }
  for (const Qrel& qrel : state.neg_qrels) {
    if (qrel.query_id == query.id && qrel.doc_id == doc_id) {
      return DocClass::Type2HardNegative;
    }
  }
  return DocClass::Type3Unlabeled;
}

/// The label-correction action table:
///
///   class  | LLM positive                       | LLM negative
///   -------+------------------------------------+----------------
///   Type 1 | skip                               | integrity flag
///   Type 2 | drop doc from D-, drop (q,d,0)     | skip
///   Type 3 | add doc to D+, add (q,d,1) to R+   | skip
///
/// The Type-1-negative cell cannot legitimately occur after query
/// filtering, so it is recorded as an integrity flag without mutating
/// state. Throws IntegrityError when `doc_class` contradicts the actual
/// set membership.
inline QcAction apply_action_matrix(const Query& query, const Document& doc,
                                    DocClass doc_class, bool llm_positive,
                                    CandidateSets& state) {
  const DocClass actual = classify_doc(query, doc.id, state);
  if (actual != doc_class) {
    throw IntegrityError("doc class mismatch for (" + query.id + ", " +
                         doc.id + "): declared " + to_string(doc_class) +
                         " but labels say " + to_string(actual));
  }

  switch (doc_class) {
    case DocClass::Type1OriginalPositive:
      return llm_positive ? QcAction::Skip : QcAction::IntegrityFlag;

    case DocClass::Type2HardNegative: {
      if (!llm_positive) return QcAction::Skip;
      std::erase_if(state.neg_qrels, [&](const Qrel& qrel) {
        return qrel.query_id == query.id && qrel.doc_id == doc.id;
      });
      const bool still_referenced =
          std::any_of(state.neg_qrels.begin(), state.neg_qrels.end(),
                      [&](const Qrel& qrel) { return qrel.doc_id == doc.id; });
      if (!still_referenced) {
        std::erase_if(state.hard_negatives,
                      [&](const Document& d) { return d.id == doc.id; });
      }
      return QcAction::RemoveFalseNegative;
    }

    case DocClass::Type3Unlabeled: {
      if (!llm_positive) return QcAction::Skip;
      const bool tracked =
          std::any_of(state.positives.begin(), state.positives.end(),
                      [&](const Document& d) { return d.id == doc.id; });
      if (!tracked) state.positives.push_back(doc);
      state.pos_qrels.push_back(Qrel{query.id, doc.id, 1});
      return QcAction::AddNewPositive;
    }
  }
  return QcAction::Skip;
}

}  // namespace airbench::qc
