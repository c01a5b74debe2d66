#pragma once

#include <cctype>
#include <optional>
#include <string>

#include "airbench/generator/prompts.hpp"
#include "airbench/providers/provider.hpp"
#include "airbench/types.hpp"

namespace airbench::qc {

/// 4-level relevance judgment; levels 2 and 3 project to binary positive,
/// level 1 ("superficially relevant but actually not") and 0 to negative.
struct RelevanceLevel {
  int level = 0;

  bool positive() const noexcept { return level >= 2; }
};

namespace detail {

inline std::optional<int> parse_level_strict(const std::string& reply) {
  std::size_t begin = 0;
  std::size_t end = reply.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(reply[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(reply[end - 1]))) --end;
  if (end - begin != 1) return std::nullopt;
  const char c = reply[begin];
  if (c < '0' || c > '3') return std::nullopt;
  return c - '0';
}

// Lenient fallback: first standalone integer anywhere in the reply.
inline std::optional<int> parse_level_lenient(const std::string& reply) {
  for (std::size_t i = 0; i < reply.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(reply[i]))) continue;
    if (i > 0 && std::isdigit(static_cast<unsigned char>(reply[i - 1]))) continue;
    std::size_t j = i;
    while (j < reply.size() && std::isdigit(static_cast<unsigned char>(reply[j]))) ++j;
    if (j - i == 1) {
      const int value = reply[i] - '0';
      if (value >= 0 && value <= 3) return value;
    }
    i = j;
  }
  return std::nullopt;
}

}  // namespace detail

inline providers::ChatParams judging_params() {
  providers::ChatParams params;
  params.temperature = 0.0;
  params.max_tokens = 8;
  return params;
}

/// Asks the LLM to grade (query, document) relevance on the 0-3 scale.
/// An unparseable reply triggers exactly one re-ask, parsed leniently;
/// a second failure raises a provider error.
inline RelevanceLevel judge_relevance(const std::string& query_text,
                                      const std::string& doc_text,
                                      providers::ChatProvider& chat,
                                      const gen::PromptLibrary& prompts) {
  const std::string prompt =
      prompts.render("judge", {{"query", query_text}, {"doc", doc_text}});
  const std::string first = chat.complete(prompt, judging_params());
  if (auto level = detail::parse_level_strict(first)) {
    return RelevanceLevel{*level};
  }
  const std::string second = chat.complete(prompt, judging_params());
  if (auto level = detail::parse_level_lenient(second)) {
    return RelevanceLevel{*level};
  }
  throw ProviderError("relevance judgment unparseable after re-ask: \"" +
                      second.substr(0, 128) + "\"");
}

inline RelevanceLevel judge_relevance(const Query& query, const Document& doc,
                                      providers::ChatProvider& chat,
                                      const gen::PromptLibrary& prompts) {
  return judge_relevance(query.text, doc.text, chat, prompts);
}

}  // namespace airbench::qc
