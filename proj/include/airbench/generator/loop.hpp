#pragma once

#include <algorithm>
#include <atomic>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "airbench/errors.hpp"
#include "airbench/generator/attributes.hpp"
#include "airbench/generator/prompts.hpp"
#include "airbench/generator/steps.hpp"
#include "airbench/providers/provider.hpp"
#include "airbench/rng.hpp"
#include "airbench/types.hpp"

namespace airbench::gen {

namespace detail {
// Substream tags keep the per-purpose random streams disjoint.
inline constexpr std::uint64_t kPositiveOrderTag = 0x706f73;   // "pos"
inline constexpr std::uint64_t kIterationTag = 0x697465;       // "ite"
}  // namespace detail

struct GenerationReport {
  int attempted = 0;
  int succeeded = 0;
  std::vector<std::pair<int, std::string>> failures;  // (iteration, reason)
  std::vector<int> hard_negative_shortfalls;
  std::vector<int> rewrite_fallbacks;
};

/// One full pass of the candidate-generation loop: n_queries iterations of
/// sample-positive -> characters -> scenario -> query -> rewrite -> hard
/// negatives. Iterations run under a bounded worker pool; every random
/// choice of iteration i comes from a substream keyed by (rng_seed, i), and
/// results are merged in iteration order, so output is identical for any
/// worker count. Failed iterations are recorded and skipped.
inline CandidateSets run_generation_loop(const std::vector<Document>& corpus,
                                         const GenerationConfig& config,
                                         providers::ChatProvider& chat,
                                         const PromptLibrary& prompts,
                                         int workers = 8,
                                         GenerationReport* report = nullptr) {
  config.validate();
  if (corpus.empty()) {
    throw ConfigError("run_generation_loop: corpus is empty");
  }
  if (workers < 1) throw ConfigError("workers must be >= 1");

  // Positive documents: a seeded shuffle gives sampling without
  // replacement until the corpus is exhausted, then per-iteration draws
  // with replacement.
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  {
    RngStream shuffle_rng(config.rng_seed, detail::kPositiveOrderTag);
    shuffle_rng.shuffle(order);
  }
  auto positive_index = [&](int iteration) -> std::size_t {
    if (static_cast<std::size_t>(iteration) < order.size()) {
      return order[static_cast<std::size_t>(iteration)];
    }
    RngStream rng(config.rng_seed, detail::kPositiveOrderTag,
                  static_cast<std::uint64_t>(iteration));
    return static_cast<std::size_t>(rng.bounded(corpus.size()));
  };

  struct IterationOutput {
    Query query;
    std::vector<Document> hard_negatives;
    bool hn_shortfall = false;
    bool rewrite_fallback = false;
  };

  const int n = config.n_queries;
  std::vector<std::optional<IterationOutput>> outputs(
      static_cast<std::size_t>(n));
  std::vector<std::pair<int, std::string>> failures;
  std::mutex failures_mutex;

  auto run_iteration = [&](int i) {
    RngStream rng(config.rng_seed, detail::kIterationTag,
                  static_cast<std::uint64_t>(i));
    const Document& positive = corpus[positive_index(i)];
    const QueryAttributes attrs = sample_attributes(config, rng);

    std::vector<std::string> characters =
        generate_characters(positive, chat, prompts);
    const std::string character =
        characters[static_cast<std::size_t>(rng.bounded(characters.size()))];
    const std::string scenario =
        generate_scenario(positive, character, chat, prompts);
    const std::string original = generate_query(positive, character, scenario,
                                                attrs, config.task, chat,
                                                prompts);
    const RewriteResult rewritten = rewrite_query(
        original, positive, attrs.style, chat, prompts, config);

    IterationOutput out;
    out.query.id = "q-" + std::to_string(i);
    out.query.text = rewritten.final_text;
    out.query.original_text = original;
    out.query.attributes = attrs;
    out.query.character = character;
    out.query.scenario = scenario;
    out.query.positive_doc_id = positive.id;
    out.query.rewrite_history = rewritten.history;
    out.rewrite_fallback = rewritten.fell_back;

    HardNegativeResult negatives = generate_hard_negatives(
        out.query.id, out.query.text, positive, chat, prompts, config, rng);
    out.hard_negatives = std::move(negatives.docs);
    out.hn_shortfall = negatives.shortfall;
    outputs[static_cast<std::size_t>(i)] = std::move(out);
  };

  std::atomic<int> next{0};
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        run_iteration(i);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failures_mutex);
        failures.emplace_back(i, e.what());
      }
    }
  };

  const int pool = std::min(workers, n);
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(pool));
    for (int t = 0; t < pool; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }

  // Merge in iteration order so parallelism never changes the result.
  CandidateSets sets;
  std::unordered_set<std::string> tracked_positives;
  if (report != nullptr) report->attempted = n;
  for (int i = 0; i < n; ++i) {
    auto& out = outputs[static_cast<std::size_t>(i)];
    if (!out.has_value()) continue;
    const Document& positive = corpus[positive_index(i)];
    if (tracked_positives.insert(positive.id).second) {
      sets.positives.push_back(positive);
    }
    sets.pos_qrels.push_back(Qrel{out->query.id, positive.id, 1});
    for (Document& hn : out->hard_negatives) {
      sets.neg_qrels.push_back(Qrel{out->query.id, hn.id, 0});
      sets.hard_negatives.push_back(std::move(hn));
    }
    if (report != nullptr) {
      ++report->succeeded;
      if (out->hn_shortfall) report->hard_negative_shortfalls.push_back(i);
      if (out->rewrite_fallback) report->rewrite_fallbacks.push_back(i);
    }
    sets.queries.push_back(std::move(out->query));
  }
  if (report != nullptr) {
    std::sort(failures.begin(), failures.end());
    report->failures = failures;
  }
  return sets;
}

}  // namespace airbench::gen
