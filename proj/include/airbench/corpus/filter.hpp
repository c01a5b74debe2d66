#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "airbench/errors.hpp"
#include "airbench/tokenizer.hpp"
#include "airbench/types.hpp"

namespace airbench::corpus {

inline constexpr std::size_t kNoMaxTokens =
    std::numeric_limits<std::size_t>::max();

/// Hook for a PII / offensive-content redaction pass over prepared
/// documents. Identity for now; a real redactor can be plugged in here
/// without touching the pipeline.
inline Document redact_document(Document doc) { return doc; }

/// Keeps documents whose token count t satisfies min_tokens <= t <=
/// max_tokens, preserving input order. Pass kNoMaxTokens to disable the
/// upper bound.
inline std::vector<Document> filter_documents(const std::vector<Document>& docs,
                                              std::size_t min_tokens,
                                              std::size_t max_tokens,
                                              const Tokenizer& tokenizer) {
  if (min_tokens > max_tokens) {
    throw ConfigError("filter_documents: min_tokens > max_tokens");
  }
  std::vector<Document> kept;
  for (const Document& doc : docs) {
    const std::size_t t = tokenizer.count(doc.text);
    if (t >= min_tokens && t <= max_tokens) kept.push_back(doc);
  }
  return kept;
}

}  // namespace airbench::corpus
