#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "airbench/tokenizer.hpp"
#include "airbench/types.hpp"

namespace airbench::corpus {

/// Summary of a corpus: document count, mean token length, and a histogram
/// of token counts keyed by bucket index (token_count / bucket_width).
struct CorpusStats {
  std::size_t doc_count = 0;
  double avg_tokens = 0.0;
  std::map<std::size_t, std::size_t> token_histogram;
  std::size_t bucket_width = 100;
};

inline CorpusStats summarize_corpus(const std::vector<Document>& docs,
                                    const Tokenizer& tokenizer,
                                    std::size_t bucket_width = 100) {
  CorpusStats stats;
  stats.bucket_width = bucket_width;
  stats.doc_count = docs.size();
  std::uint64_t total = 0;
  for (const Document& doc : docs) {
    const std::size_t t = tokenizer.count(doc.text);
    total += t;
    stats.token_histogram[t / bucket_width] += 1;
  }
  stats.avg_tokens =
      docs.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(docs.size());
  return stats;
}

}  // namespace airbench::corpus
