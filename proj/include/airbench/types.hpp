#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "airbench/errors.hpp"

namespace airbench {

enum class Task { QA, LongDoc };

inline std::string to_string(Task task) {
  return task == Task::QA ? "qa" : "long-doc";
}

inline Task task_from_string(const std::string& s) {
  if (s == "qa" || s == "QA") return Task::QA;
  if (s == "long-doc" || s == "longdoc" || s == "long_doc") return Task::LongDoc;
  throw ConfigError("unknown task: " + s);
}

enum class DocOrigin { SeedCorpus, HardNegative, LongDocChunk };

inline std::string to_string(DocOrigin origin) {
  switch (origin) {
    case DocOrigin::SeedCorpus: return "seed";
    case DocOrigin::HardNegative: return "hard_negative";
    case DocOrigin::LongDocChunk: return "chunk";
  }
  return "seed";
}

inline DocOrigin doc_origin_from_string(const std::string& s) {
  if (s == "seed") return DocOrigin::SeedCorpus;
  if (s == "hard_negative") return DocOrigin::HardNegative;
  if (s == "chunk") return DocOrigin::LongDocChunk;
  throw ConfigError("unknown document origin: " + s);
}

/// One corpus entry. `source_meta` carries free-form provenance such as the
/// parent document id and chunk index for Long-Doc chunks.
struct Document {
  std::string id;
  std::string title;
  std::string text;
  DocOrigin origin = DocOrigin::SeedCorpus;
  std::map<std::string, std::string> source_meta;

  bool operator==(const Document&) const = default;
};

enum class LengthBucket { Under5, From5To9, From10To20, Over20 };
enum class QueryType { Question, Problem, Claim };
enum class InfoType { Overall, Partial };
enum class Style {
  Concise,
  Casual,
  Informal,
  Formal,
  Professional,
  Complicated,
  Academic
};

inline constexpr std::size_t kLengthBucketCount = 4;
inline constexpr std::size_t kQueryTypeCount = 3;
inline constexpr std::size_t kInfoTypeCount = 2;
inline constexpr std::size_t kStyleCount = 7;

inline std::string to_string(LengthBucket b) {
  switch (b) {
    case LengthBucket::Under5: return "under_5";
    case LengthBucket::From5To9: return "5_to_9";
    case LengthBucket::From10To20: return "10_to_20";
    case LengthBucket::Over20: return "over_20";
  }
  return "under_5";
}

inline std::string to_string(QueryType t) {
  switch (t) {
    case QueryType::Question: return "question";
    case QueryType::Problem: return "problem";
    case QueryType::Claim: return "claim";
  }
  return "question";
}

inline std::string to_string(InfoType t) {
  return t == InfoType::Overall ? "overall" : "partial";
}

inline std::string to_string(Style s) {
  switch (s) {
    case Style::Concise: return "concise";
    case Style::Casual: return "casual";
    case Style::Informal: return "informal";
    case Style::Formal: return "formal";
    case Style::Professional: return "professional";
    case Style::Complicated: return "complicated";
    case Style::Academic: return "academic";
  }
  return "concise";
}

inline LengthBucket length_bucket_from_string(const std::string& s) {
  if (s == "under_5") return LengthBucket::Under5;
  if (s == "5_to_9") return LengthBucket::From5To9;
  if (s == "10_to_20") return LengthBucket::From10To20;
  if (s == "over_20") return LengthBucket::Over20;
  throw ConfigError("unknown length bucket: " + s);
}

inline QueryType query_type_from_string(const std::string& s) {
  if (s == "question") return QueryType::Question;
  if (s == "problem") return QueryType::Problem;
  if (s == "claim") return QueryType::Claim;
  throw ConfigError("unknown query type: " + s);
}

inline InfoType info_type_from_string(const std::string& s) {
  if (s == "overall") return InfoType::Overall;
  if (s == "partial") return InfoType::Partial;
  throw ConfigError("unknown info type: " + s);
}

inline Style style_from_string(const std::string& s) {
  if (s == "concise") return Style::Concise;
  if (s == "casual") return Style::Casual;
  if (s == "informal") return Style::Informal;
  if (s == "formal") return Style::Formal;
  if (s == "professional") return Style::Professional;
  if (s == "complicated") return Style::Complicated;
  if (s == "academic") return Style::Academic;
  throw ConfigError("unknown style: " + s);
}

struct QueryAttributes {
  LengthBucket length_bucket = LengthBucket::From5To9;
  QueryType query_type = QueryType::Question;
  InfoType info_type = InfoType::Overall;
  Style style = Style::Concise;

  bool operator==(const QueryAttributes&) const = default;

  /// Claim queries may only use the two long length buckets; Long-Doc
  /// configs never produce Problem queries.
  bool valid_for(Task task) const {
    if (query_type == QueryType::Claim &&
        (length_bucket == LengthBucket::Under5 ||
         length_bucket == LengthBucket::From5To9)) {
      return false;
    }
    if (task == Task::LongDoc && query_type == QueryType::Problem) {
      return false;
    }
    return true;
  }
};

/// A generated query with full provenance. `text` is the final rewritten
/// form; `rewrite_history` starts at `original_text` and ends at `text`.
struct Query {
  std::string id;
  std::string text;
  std::string original_text;
  QueryAttributes attributes;
  std::string character;
  std::string scenario;
  std::string positive_doc_id;
  std::vector<std::string> rewrite_history;

  bool operator==(const Query&) const = default;
};

/// (query id, document id, binary relevance) triple.
struct Qrel {
  std::string query_id;
  std::string doc_id;
  int relevance = 0;

  bool operator==(const Qrel&) const = default;
  auto operator<=>(const Qrel&) const = default;
};

/// Ordered retrieval output for one query: doc ids with scores, scores
/// non-increasing, ties ordered by ascending doc id.
struct RankedList {
  std::string query_id;
  std::vector<std::pair<std::string, double>> entries;
};

/// Output of the candidate-generation loop: queries plus the positive and
/// hard-negative documents and their relevance labels.
struct CandidateSets {
  std::vector<Query> queries;          // Q
  std::vector<Document> positives;     // D+
  std::vector<Document> hard_negatives;  // D-
  std::vector<Qrel> pos_qrels;         // R+
  std::vector<Qrel> neg_qrels;         // R-
};

enum class SplitKind { Dev, Test };

inline std::string to_string(SplitKind s) {
  return s == SplitKind::Dev ? "dev" : "test";
}

inline SplitKind split_from_string(const std::string& s) {
  if (s == "dev") return SplitKind::Dev;
  if (s == "test") return SplitKind::Test;
  throw ConfigError("unknown split: " + s);
}

using SplitAssignment = std::map<std::string, SplitKind>;

/// Final pipeline output: unioned corpus, retained queries, binary qrels,
/// and the dev/test assignment covering exactly those queries.
struct DatasetBundle {
  std::vector<Document> corpus;
  std::vector<Query> queries;
  std::vector<Qrel> qrels;
  SplitAssignment split;
};

}  // namespace airbench
