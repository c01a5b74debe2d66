#pragma once

#include <string>
#include <vector>

#include "airbench/errors.hpp"
#include "airbench/tokenizer.hpp"
#include "airbench/types.hpp"

namespace airbench::corpus {

/// Splits `text` into fixed-size token windows with the given overlap.
/// Chunk i covers the token window [i*stride, i*stride + chunk_size) where
/// stride = chunk_size - overlap; the final chunk may be shorter. The chunk
/// text is the byte range from the first to the last token of its window,
/// so re-tokenizing a chunk reproduces exactly the window's tokens.
///
/// Emitted ids are "<parent-id>-chunk-<i>"; source_meta records the parent
/// id and chunk index.
inline std::vector<Document> chunk_long_document(const std::string& parent_id,
                                                 const std::string& title,
                                                 const std::string& text,
                                                 std::size_t chunk_size,
                                                 std::size_t overlap,
                                                 const Tokenizer& tokenizer) {
  if (chunk_size == 0) throw ConfigError("chunk_long_document: chunk_size must be positive");
  if (overlap >= chunk_size) {
    throw ConfigError("chunk_long_document: overlap must be smaller than chunk_size");
  }
  if (text.empty()) throw InputError("chunk_long_document: empty text");

  const std::vector<TokenSpan> spans = tokenizer.token_spans(text);
  const std::size_t total = spans.size();
  const std::size_t stride = chunk_size - overlap;

  std::vector<Document> chunks;
  if (total == 0) {
    // Whitespace/punctuation-only text still yields one chunk of the raw text.
    Document doc;
    doc.id = parent_id + "-chunk-0";
    doc.title = title;
    doc.text = text;
    doc.origin = DocOrigin::LongDocChunk;
    doc.source_meta["parent_id"] = parent_id;
    doc.source_meta["chunk_index"] = "0";
    chunks.push_back(std::move(doc));
    return chunks;
  }

  for (std::size_t index = 0, start = 0;; ++index, start += stride) {
    const std::size_t end = std::min(start + chunk_size, total);
    Document doc;
    doc.id = parent_id + "-chunk-" + std::to_string(index);
    doc.title = title;
    doc.text = text.substr(spans[start].begin,
                           spans[end - 1].end - spans[start].begin);
    doc.origin = DocOrigin::LongDocChunk;
    doc.source_meta["parent_id"] = parent_id;
    doc.source_meta["chunk_index"] = std::to_string(index);
    chunks.push_back(std::move(doc));
    if (end == total) break;
  }
  return chunks;
}

/// Chunk count for a document of `total_tokens` tokens under the window
/// scheme above: 1 if it fits in one chunk, otherwise
/// ceil((T - chunk_size) / stride) + 1.
inline std::size_t expected_chunk_count(std::size_t total_tokens,
                                        std::size_t chunk_size,
                                        std::size_t overlap) {
  if (overlap >= chunk_size) {
    throw ConfigError("expected_chunk_count: overlap must be smaller than chunk_size");
  }
  if (total_tokens <= chunk_size) return 1;
  const std::size_t stride = chunk_size - overlap;
  return (total_tokens - chunk_size + stride - 1) / stride + 1;
}

}  // namespace airbench::corpus
