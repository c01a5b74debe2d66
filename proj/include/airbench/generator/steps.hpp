#pragma once

#include <string>
#include <vector>

#include "airbench/errors.hpp"
#include "airbench/generator/attributes.hpp"
#include "airbench/generator/prompts.hpp"
#include "airbench/providers/provider.hpp"
#include "airbench/tokenizer.hpp"
#include "airbench/types.hpp"

namespace airbench::gen {

/// Sampling temperature for generation prompts; judging runs at 0.
inline constexpr double kGenerationTemperature = 0.8;

inline providers::ChatParams generation_params() {
  providers::ChatParams params;
  params.temperature = kGenerationTemperature;
  return params;
}

/// Characters who might find the document useful, one per reply line.
inline std::vector<std::string> generate_characters(
    const Document& doc, providers::ChatProvider& chat,
    const PromptLibrary& prompts) {
  if (doc.text.empty()) throw InputError("generate_characters: empty document");
  const std::string prompt = prompts.render(
      "character", {{"title", doc.title}, {"document", doc.text}});
  const std::string reply = chat.complete(prompt, generation_params());
  std::vector<std::string> characters = parse_fenced_lines(reply);
  if (characters.empty()) {
    throw ParseError("character reply contained no usable lines", 1);
  }
  return characters;
}

/// One scenario in which `character` would find the document useful.
inline std::string generate_scenario(const Document& doc,
                                     const std::string& character,
                                     providers::ChatProvider& chat,
                                     const PromptLibrary& prompts) {
  const std::string prompt =
      prompts.render("scenario", {{"title", doc.title},
                                  {"document", doc.text},
                                  {"character", character}});
  const std::string reply = chat.complete(prompt, generation_params());
  std::vector<std::string> lines = parse_fenced_lines(reply);
  if (lines.empty()) {
    throw ParseError("scenario reply contained no usable lines", 1);
  }
  return lines.front();
}

/// The original (pre-rewrite) query. The prompt carries the length, type,
/// and information-type instructions; style is applied later at rewrite.
inline std::string generate_query(const Document& doc,
                                  const std::string& character,
                                  const std::string& scenario,
                                  const QueryAttributes& attrs, Task task,
                                  providers::ChatProvider& chat,
                                  const PromptLibrary& prompts) {
  if (!attrs.valid_for(task)) {
    throw ConfigError("query attributes violate the task's invariants");
  }
  const std::string prompt = prompts.render(
      "query", {{"title", doc.title},
                {"document", doc.text},
                {"character", character},
                {"scenario", scenario},
                {"type_instruction", type_instruction(attrs.query_type)},
                {"length_instruction", length_instruction(attrs.length_bucket)},
                {"info_instruction", info_instruction(attrs.info_type)}});
  const std::string reply = chat.complete(prompt, generation_params());
  std::vector<std::string> lines = parse_fenced_lines(reply);
  if (lines.empty()) {
    throw ParseError("query reply contained no usable lines", 1);
  }
  return lines.front();
}

struct RewriteResult {
  std::string final_text;
  std::vector<std::string> history;  // starts at the input query
  bool fell_back = false;            // all rewrites were empty
};

/// Iteratively rewrites `query` in the given style, stopping early once the
/// token-set Jaccard overlap with the positive document drops below the
/// configured threshold. Keeps the last candidate otherwise.
inline RewriteResult rewrite_query(const std::string& query,
                                   const Document& positive_doc, Style style,
                                   providers::ChatProvider& chat,
                                   const PromptLibrary& prompts,
                                   const GenerationConfig& config) {
  if (query.empty()) throw InputError("rewrite_query: empty query");
  const Tokenizer tokenizer;
  RewriteResult result;
  result.history.push_back(query);
  result.final_text = query;
  bool any_nonempty = false;
  std::string current = query;
  for (int iter = 0; iter < config.rewrite_max_iters; ++iter) {
    const std::string prompt =
        prompts.render("rewrite", {{"style", to_string(style)},
                                   {"query", current},
                                   {"document", positive_doc.text}});
    const std::string reply = chat.complete(prompt, generation_params());
    std::vector<std::string> lines = parse_fenced_lines(reply);
    if (lines.empty()) continue;
    any_nonempty = true;
    current = lines.front();
    result.history.push_back(current);
    result.final_text = current;
    const double overlap =
        token_set_jaccard(current, positive_doc.text, tokenizer);
    if (overlap < config.rewrite_overlap_threshold) break;
  }
  if (!any_nonempty) {
    result.fell_back = true;
    result.final_text = query;
    result.history = {query};
  }
  return result;
}

struct HardNegativeResult {
  std::vector<Document> docs;
  int requested = 0;
  bool shortfall = false;  // provider returned fewer parseable docs
};

/// Hard negatives for one query. The count is drawn uniformly from the
/// config's range; Long-Doc tasks draw from [0,0] and return nothing.
inline HardNegativeResult generate_hard_negatives(
    const std::string& query_id, const std::string& query,
    const Document& positive_doc, providers::ChatProvider& chat,
    const PromptLibrary& prompts, const GenerationConfig& config,
    RngStream& rng) {
  const auto [lo, hi] = config.effective_hard_negative_range();
  HardNegativeResult result;
  result.requested = static_cast<int>(rng.uniform_int(lo, hi));
  if (result.requested == 0) return result;

  const std::string prompt = prompts.render(
      "hard_negative", {{"count", std::to_string(result.requested)},
                        {"query", query},
                        {"document", positive_doc.text}});
  const std::string reply = chat.complete(prompt, generation_params());
  std::vector<std::string> lines = parse_fenced_lines(reply);
  int emitted = 0;
  for (const std::string& line : lines) {
    if (emitted >= result.requested) break;
    if (line == positive_doc.text) continue;  // must differ from the positive
    Document doc;
    doc.id = query_id + "-hn-" + std::to_string(emitted);
    doc.text = line;
    doc.origin = DocOrigin::HardNegative;
    doc.source_meta["query_id"] = query_id;
    result.docs.push_back(std::move(doc));
    ++emitted;
  }
  result.shortfall = emitted < result.requested;
  return result;
}

}  // namespace airbench::gen
