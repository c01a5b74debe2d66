#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "airbench/errors.hpp"
#include "airbench/generator/prompts.hpp"
#include "airbench/providers/provider.hpp"
#include "airbench/tokenizer.hpp"
#include "airbench/types.hpp"

namespace airbench::eval {

/// Weighted Jaccard similarity between two corpora's token frequency
/// distributions: sum(min(wA, wB)) / sum(max(wA, wB)) over the merged
/// vocabulary, where w is a token's relative frequency within its corpus.
inline double weighted_jaccard(const std::vector<Document>& corpus_a,
                               const std::vector<Document>& corpus_b,
                               const Tokenizer& tokenizer) {
  if (corpus_a.empty() || corpus_b.empty()) {
    throw InputError("weighted_jaccard: corpora must be non-empty");
  }
  auto frequencies = [&](const std::vector<Document>& docs) {
    std::map<std::string, double> freq;
    double total = 0.0;
    for (const Document& doc : docs) {
      for (const std::string& token : tokenizer.tokenize(doc.text)) {
        freq[token] += 1.0;
        total += 1.0;
      }
    }
    if (total > 0.0) {
      for (auto& [token, count] : freq) count /= total;
    }
    return freq;
  };
  const auto freq_a = frequencies(corpus_a);
  const auto freq_b = frequencies(corpus_b);

  // Walk the merged vocabulary in key order so the accumulation order (and
  // hence the result, bit for bit) is the same for (a,b) and (b,a).
  double min_sum = 0.0;
  double max_sum = 0.0;
  auto ia = freq_a.begin();
  auto ib = freq_b.begin();
  while (ia != freq_a.end() || ib != freq_b.end()) {
    double wa = 0.0;
    double wb = 0.0;
    if (ib == freq_b.end() || (ia != freq_a.end() && ia->first < ib->first)) {
      wa = (ia++)->second;
    } else if (ia == freq_a.end() || ib->first < ia->first) {
      wb = (ib++)->second;
    } else {
      wa = (ia++)->second;
      wb = (ib++)->second;
    }
    min_sum += std::min(wa, wb);
    max_sum += std::max(wa, wb);
  }
  if (max_sum == 0.0) return 1.0;  // both corpora tokenized to nothing
  return min_sum / max_sum;
}

enum class DiversityFacet { Type, Style };

inline const std::vector<std::string>& facet_labels(DiversityFacet facet) {
  static const std::vector<std::string> type_labels{
      "how", "what", "when",   "where", "which",
      "who", "why",  "yes/no", "claim", "others"};
  static const std::vector<std::string> style_labels{
      "formal", "informal", "professional", "casual",
      "complicated", "concise", "academic", "others"};
  return facet == DiversityFacet::Type ? type_labels : style_labels;
}

namespace detail {

inline std::string normalize_label(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  const auto first = text.find_first_not_of(" \t\r\n.\"'`");
  if (first == std::string::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n.\"'`");
  return text.substr(first, last - first + 1);
}

}  // namespace detail

/// Labels every query with its most suitable type or style, as picked by
/// the LLM from the facet's closed label set. Unparseable or failing
/// replies fall back to "others".
inline std::map<std::string, std::string> label_query_diversity(
    const std::vector<Query>& queries, providers::ChatProvider& chat,
    DiversityFacet facet, const gen::PromptLibrary& prompts) {
  const std::vector<std::string>& labels = facet_labels(facet);
  const std::string template_name =
      facet == DiversityFacet::Type ? "diversity_type" : "diversity_style";
  std::map<std::string, std::string> out;
  for (const Query& query : queries) {
    std::string label = "others";
    try {
      providers::ChatParams params;
      params.temperature = 0.0;
      params.max_tokens = 16;
      const std::string reply = chat.complete(
          prompts.render(template_name, {{"query", query.text}}), params);
      std::string normalized = detail::normalize_label(reply);
      if (normalized == "yes-no" || normalized == "yesno" ||
          normalized == "yes or no") {
        normalized = "yes/no";
      }
      if (std::find(labels.begin(), labels.end(), normalized) != labels.end()) {
        label = normalized;
      }
    } catch (const ProviderError&) {
      label = "others";
    }
    out[query.id] = label;
  }
  return out;
}

/// Label histogram as fractions of the labeled set.
inline std::map<std::string, double> label_distribution(
    const std::map<std::string, std::string>& labels) {
  std::map<std::string, double> distribution;
  for (const auto& [query_id, label] : labels) distribution[label] += 1.0;
  for (auto& [label, count] : distribution) {
    count /= static_cast<double>(labels.size());
  }
  return distribution;
}

}  // namespace airbench::eval
