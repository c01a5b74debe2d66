// airbench - synthesize and evaluate retrieval benchmarks from raw corpora.
//
// Subcommands: prepare, generate, qc, bm25 index|search, eval, rerank-eval,
// consistency, diversity, similarity. A single JSON config file drives the
// pipeline; CLI flags override it; every command prints the effective
// seeded config so runs are reproducible.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "airbench/cli/pipeline.hpp"
#include "airbench/corpus/io.hpp"
#include "airbench/errors.hpp"
#include "airbench/eval/bm25.hpp"
#include "airbench/eval/diversity.hpp"
#include "airbench/eval/metrics.hpp"
#include "airbench/eval/rerank.hpp"
#include "airbench/eval/run_io.hpp"
#include "airbench/eval/stats.hpp"
#include "airbench/generator/prompts.hpp"
#include "airbench/providers/http.hpp"
#include "airbench/providers/mock.hpp"

namespace ab = airbench;
using nlohmann::json;

namespace {

json default_config() {
  return json{
      {"task", "qa"},
      {"seed", 0},
      {"workers", 8},
      {"tokenizer", "unicode"},
      {"templates_dir", ""},
      {"prepare",
       {{"min_tokens", 20},
        {"max_tokens", 8192},
        {"chunk_size", 200},
        {"overlap", 50}}},
      {"generation",
       {{"n_queries", 10},
        {"length_ratio", {1, 4, 2, 1}},
        {"type_ratio", {3, 1, 1}},
        {"info_ratio", {1, 1}},
        {"style_ratio", {5, 3, 3, 1, 1, 1, 1}},
        {"hard_negative_range", {3, 7}},
        {"rewrite_max_iters", 3},
        {"rewrite_overlap_threshold", 0.6}}},
      {"qc",
       {{"recall_k", 1000},
        {"threshold_hard_negative", 20},
        {"threshold_other", 10},
        {"dev_fraction", 0.2},
        {"longdoc_dev", false}}},
      {"providers",
       {{"chat",
         {{"kind", "mock"},
          {"base_url", "http://localhost:8000/v1"},
          {"model", ""},
          {"api_key_env", ""},
          {"timeout_ms", 30000},
          {"max_retries", 3},
          {"backoff_initial_ms", 500},
          {"backoff_multiplier", 2.0},
          {"rate_limit_per_minute", 600},
          {"max_input_tokens", 32768},
          {"transcript", ""}}},
        {"embed",
         {{"kind", "mock"},
          {"base_url", "http://localhost:8000/v1"},
          {"model", ""},
          {"api_key_env", ""},
          {"timeout_ms", 30000},
          {"max_retries", 3},
          {"backoff_initial_ms", 500},
          {"backoff_multiplier", 2.0},
          {"rate_limit_per_minute", 600},
          {"max_input_tokens", 512},
          {"dim", 256},
          {"transcript", ""}}},
        {"rerank",
         json::array({{{"kind", "mock"},
                       {"id", "token-overlap"},
                       {"base_url", "http://localhost:8000/v1"},
                       {"model", ""},
                       {"api_key_env", ""},
                       {"timeout_ms", 30000},
                       {"max_retries", 3},
                       {"backoff_initial_ms", 500},
                       {"backoff_multiplier", 2.0},
                       {"rate_limit_per_minute", 600},
                       {"max_input_tokens", 512},
                       {"transcript", ""}}})}}}};
}

void deep_merge(json& base, const json& overlay) {
  if (!overlay.is_object() || !base.is_object()) {
    base = overlay;
    return;
  }
  for (const auto& [key, value] : overlay.items()) {
    if (base.contains(key) && base[key].is_object() && value.is_object()) {
      deep_merge(base[key], value);
    } else {
      base[key] = value;
    }
  }
}

struct AppContext {
  std::string config_path;
  long long seed_flag = -1;
  int workers_flag = -1;
  bool dry_run = false;
  json config;

  void finalize() {
    config = default_config();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ab::InputError("cannot open config: " + config_path);
      json user = json::parse(in, nullptr, false);
      if (user.is_discarded()) {
        throw ab::InputError("config file is not valid JSON: " + config_path);
      }
      deep_merge(config, user);
    }
    if (seed_flag >= 0) config["seed"] = seed_flag;
    if (workers_flag > 0) config["workers"] = workers_flag;
  }

  std::uint64_t seed() const { return config.at("seed").get<std::uint64_t>(); }
  int workers() const { return config.at("workers").get<int>(); }
  ab::Task task() const {
    return ab::task_from_string(config.at("task").get<std::string>());
  }
  std::string tokenizer_name() const {
    return config.at("tokenizer").get<std::string>();
  }

  ab::gen::PromptLibrary prompts() const {
    const std::string dir = config.at("templates_dir").get<std::string>();
    if (dir.empty()) return ab::gen::PromptLibrary::defaults();
    return ab::gen::PromptLibrary::load(dir);
  }

  void print_effective(const std::string& command) const {
    json effective = config;
    effective["command"] = command;
    effective["dry_run"] = dry_run;
    std::cout << "effective-config: " << effective.dump() << "\n";
  }
};

ab::providers::ProviderConfig provider_config_from_json(const json& j,
                                                        const std::string& role) {
  ab::providers::ProviderConfig config;
  config.base_url = j.value("base_url", std::string{});
  config.model_name = j.value("model", std::string{});
  const std::string key_env = j.value("api_key_env", std::string{});
  if (!key_env.empty()) {
    if (const char* key = std::getenv(key_env.c_str())) config.api_key = key;
  }
  config.timeout = std::chrono::milliseconds(j.value("timeout_ms", 30000));
  config.max_retries = j.value("max_retries", 3);
  config.backoff_initial =
      std::chrono::milliseconds(j.value("backoff_initial_ms", 500));
  config.backoff_multiplier = j.value("backoff_multiplier", 2.0);
  config.rate_limit_per_minute = j.value("rate_limit_per_minute", 600.0);
  config.max_input_tokens = j.value("max_input_tokens", 512);
  ab::providers::apply_env_overrides(config, role);
  return config;
}

/// Owns every provider a command uses, including record/replay transcripts.
struct ProviderSet {
  std::vector<std::unique_ptr<ab::providers::ChatProvider>> chat_storage;
  std::vector<std::unique_ptr<ab::providers::EmbeddingProvider>> embed_storage;
  std::vector<std::unique_ptr<ab::providers::RerankProvider>> rerank_storage;
  std::vector<std::shared_ptr<ab::providers::Transcript>> transcripts;
  std::vector<std::pair<std::shared_ptr<ab::providers::Transcript>,
                        std::filesystem::path>>
      to_save;

  ab::providers::ChatProvider* chat = nullptr;
  ab::providers::EmbeddingProvider* embed = nullptr;
  std::vector<ab::providers::RerankProvider*> rerankers;

  void flush() {
    for (const auto& [transcript, path] : to_save) transcript->save(path);
  }
};

ProviderSet make_providers(const AppContext& app) {
  ProviderSet set;
  const json& providers = app.config.at("providers");

  auto transcript_for = [&](const json& j)
      -> std::shared_ptr<ab::providers::Transcript> {
    const std::string path = j.value("transcript", std::string{});
    if (path.empty()) {
      throw ab::ConfigError("provider kind needs a 'transcript' path");
    }
    return std::make_shared<ab::providers::Transcript>(
        ab::providers::Transcript::load(path));
  };

  // chat
  {
    const json& j = providers.at("chat");
    const std::string kind = j.value("kind", "mock");
    if (kind == "mock") {
      set.chat_storage.push_back(
          std::make_unique<ab::providers::PipelineChatMock>());
    } else if (kind == "echo") {
      set.chat_storage.push_back(
          std::make_unique<ab::providers::EchoChatProvider>());
    } else if (kind == "http" || kind == "record") {
      set.chat_storage.push_back(
          std::make_unique<ab::providers::HttpChatProvider>(
              provider_config_from_json(j, "CHAT")));
      if (kind == "record") {
        auto transcript = std::make_shared<ab::providers::Transcript>();
        set.transcripts.push_back(transcript);
        set.to_save.emplace_back(transcript, j.at("transcript").get<std::string>());
        set.chat_storage.push_back(
            std::make_unique<ab::providers::RecordingChatProvider>(
                *set.chat_storage.back(), *transcript));
      }
    } else if (kind == "replay") {
      auto transcript = transcript_for(j);
      set.transcripts.push_back(transcript);
      set.chat_storage.push_back(
          std::make_unique<ab::providers::ReplayChatProvider>(*transcript));
    } else {
      throw ab::ConfigError("unknown chat provider kind: " + kind);
    }
    set.chat = set.chat_storage.back().get();
  }

  // embed
  {
    const json& j = providers.at("embed");
    const std::string kind = j.value("kind", "mock");
    if (kind == "mock") {
      set.embed_storage.push_back(
          std::make_unique<ab::providers::HashingEmbeddingProvider>(
              j.value("dim", 256)));
    } else if (kind == "http" || kind == "record") {
      set.embed_storage.push_back(
          std::make_unique<ab::providers::HttpEmbeddingProvider>(
              provider_config_from_json(j, "EMBED")));
      if (kind == "record") {
        auto transcript = std::make_shared<ab::providers::Transcript>();
        set.transcripts.push_back(transcript);
        set.to_save.emplace_back(transcript, j.at("transcript").get<std::string>());
        set.embed_storage.push_back(
            std::make_unique<ab::providers::RecordingEmbeddingProvider>(
                *set.embed_storage.back(), *transcript));
      }
    } else if (kind == "replay") {
      auto transcript = transcript_for(j);
      set.transcripts.push_back(transcript);
      set.embed_storage.push_back(
          std::make_unique<ab::providers::ReplayEmbeddingProvider>(*transcript));
    } else {
      throw ab::ConfigError("unknown embed provider kind: " + kind);
    }
    set.embed = set.embed_storage.back().get();
  }

  // rerankers
  for (const json& j : providers.at("rerank")) {
    const std::string kind = j.value("kind", "mock");
    if (kind == "mock") {
      set.rerank_storage.push_back(
          std::make_unique<ab::providers::TokenOverlapReranker>(
              j.value("id", "token-overlap")));
    } else if (kind == "http" || kind == "record") {
      set.rerank_storage.push_back(
          std::make_unique<ab::providers::HttpRerankProvider>(
              provider_config_from_json(j, "RERANK")));
      if (kind == "record") {
        auto transcript = std::make_shared<ab::providers::Transcript>();
        set.transcripts.push_back(transcript);
        set.to_save.emplace_back(transcript, j.at("transcript").get<std::string>());
        set.rerank_storage.push_back(
            std::make_unique<ab::providers::RecordingRerankProvider>(
                *set.rerank_storage.back(), *transcript));
      }
    } else if (kind == "replay") {
      auto transcript = transcript_for(j);
      set.transcripts.push_back(transcript);
      set.rerank_storage.push_back(
          std::make_unique<ab::providers::ReplayRerankProvider>(
              *transcript, j.value("id", "replay")));
    } else {
      throw ab::ConfigError("unknown rerank provider kind: " + kind);
    }
    set.rerankers.push_back(set.rerank_storage.back().get());
  }
  if (set.rerankers.empty()) {
    throw ab::ConfigError("at least one rerank provider is required");
  }
  return set;
}

std::vector<int> parse_rank_list(const std::string& text) {
  std::vector<int> ranks;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      ranks.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw ab::ConfigError("rank list entry is not an integer: " + item);
    }
  }
  if (ranks.empty()) throw ab::ConfigError("empty rank list");
  return ranks;
}

std::map<std::string, double> read_scores_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ab::InputError("cannot open scores file: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ab::InputError("scores file is not JSON: " + path);
  std::map<std::string, double> scores;
  for (const auto& [model, value] : j.items()) {
    scores[model] = value.get<double>();
  }
  return scores;
}

ab::gen::GenerationConfig generation_config_from(const AppContext& app) {
  const json& g = app.config.at("generation");
  ab::gen::GenerationConfig config;
  config.task = app.task();
  config.n_queries = g.at("n_queries").get<int>();
  const auto ratio4 = g.at("length_ratio").get<std::vector<double>>();
  const auto ratio3 = g.at("type_ratio").get<std::vector<double>>();
  const auto ratio2 = g.at("info_ratio").get<std::vector<double>>();
  const auto ratio7 = g.at("style_ratio").get<std::vector<double>>();
  if (ratio4.size() != 4 || ratio3.size() != 3 || ratio2.size() != 2 ||
      ratio7.size() != 7) {
    throw ab::ConfigError("ratio vectors must have sizes 4/3/2/7");
  }
  std::copy(ratio4.begin(), ratio4.end(), config.length_ratio.begin());
  std::copy(ratio3.begin(), ratio3.end(), config.type_ratio.begin());
  std::copy(ratio2.begin(), ratio2.end(), config.info_ratio.begin());
  std::copy(ratio7.begin(), ratio7.end(), config.style_ratio.begin());
  const auto range = g.at("hard_negative_range").get<std::vector<int>>();
  if (range.size() != 2) {
    throw ab::ConfigError("hard_negative_range must be [lo, hi]");
  }
  config.hard_negative_range = {range[0], range[1]};
  config.rewrite_max_iters = g.at("rewrite_max_iters").get<int>();
  config.rewrite_overlap_threshold =
      g.at("rewrite_overlap_threshold").get<double>();
  config.rng_seed = app.seed();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"airbench: synthetic retrieval-benchmark pipeline and evaluator"};
  app.require_subcommand(1);

  AppContext ctx;
  app.add_option("--config", ctx.config_path, "JSON config file");
  app.add_option("--seed", ctx.seed_flag, "RNG seed (overrides config)");
  app.add_option("--workers", ctx.workers_flag, "worker pool size (overrides config)");
  app.add_flag("--dry-run", ctx.dry_run, "validate and plan without provider calls");

  // prepare
  auto* cmd_prepare = app.add_subcommand("prepare", "filter or chunk a raw corpus");
  std::string prepare_input, prepare_output, prepare_task;
  long long min_tokens = -1, max_tokens = -1, chunk_size = -1, overlap = -1;
  cmd_prepare->add_option("--input", prepare_input, "raw corpus (jsonl)")->required();
  cmd_prepare->add_option("--output", prepare_output, "prepared corpus path")->required();
  cmd_prepare->add_option("--task", prepare_task, "qa | long-doc (overrides config)");
  cmd_prepare->add_option("--min-tokens", min_tokens, "QA filter lower bound");
  cmd_prepare->add_option("--max-tokens", max_tokens, "QA filter upper bound (0 = unbounded)");
  cmd_prepare->add_option("--chunk-size", chunk_size, "Long-Doc chunk size in tokens");
  cmd_prepare->add_option("--overlap", overlap, "Long-Doc chunk overlap in tokens");

  // generate
  auto* cmd_generate = app.add_subcommand("generate", "run the candidate-generation loop");
  std::string gen_corpus, gen_out_dir;
  long long gen_n = -1;
  cmd_generate->add_option("--corpus", gen_corpus, "prepared corpus (jsonl)")->required();
  cmd_generate->add_option("--out-dir", gen_out_dir, "candidate output directory")->required();
  cmd_generate->add_option("--n", gen_n, "number of queries (overrides config)");

  // qc
  auto* cmd_qc = app.add_subcommand("qc", "quality control: filter, correct, split, assemble");
  std::string qc_candidates, qc_seed_corpus, qc_out_dir;
  bool qc_resume = false;
  cmd_qc->add_option("--candidates", qc_candidates, "candidate directory from `generate`")->required();
  cmd_qc->add_option("--seed-corpus", qc_seed_corpus, "prepared corpus (jsonl)")->required();
  cmd_qc->add_option("--out-dir", qc_out_dir, "bundle output directory")->required();
  cmd_qc->add_flag("--resume", qc_resume, "resume from the existing QC report");

  // bm25
  auto* cmd_bm25 = app.add_subcommand("bm25", "lexical baseline");
  cmd_bm25->require_subcommand(1);
  auto* bm25_index = cmd_bm25->add_subcommand("index", "build an index");
  std::string bi_corpus, bi_out;
  double bm25_k1 = 0.9, bm25_b = 0.4;
  bm25_index->add_option("--corpus", bi_corpus, "corpus (jsonl)")->required();
  bm25_index->add_option("--out", bi_out, "index output path")->required();
  bm25_index->add_option("--k1", bm25_k1, "BM25 k1");
  bm25_index->add_option("--b", bm25_b, "BM25 b");
  auto* bm25_search = cmd_bm25->add_subcommand("search", "search an index");
  std::string bs_index, bs_queries, bs_out, bs_tag = "bm25";
  long long bs_k = 100;
  bm25_search->add_option("--index", bs_index, "index path")->required();
  bm25_search->add_option("--queries", bs_queries, "queries (jsonl)")->required();
  bm25_search->add_option("--out", bs_out, "run file output")->required();
  bm25_search->add_option("--k", bs_k, "results per query");
  bm25_search->add_option("--tag", bs_tag, "run tag");

  // eval
  auto* cmd_eval = app.add_subcommand("eval", "score a run against a bundle");
  std::string ev_bundle, ev_run, ev_split = "all", ev_report, ev_csv, ev_task;
  long long ev_k = 10;
  cmd_eval->add_option("--bundle", ev_bundle, "bundle directory")->required();
  cmd_eval->add_option("--run", ev_run, "run file (TREC format)")->required();
  cmd_eval->add_option("--split", ev_split, "dev | test | all");
  cmd_eval->add_option("--task", ev_task, "qa | long-doc (overrides config)");
  cmd_eval->add_option("--k", ev_k, "metric cutoff");
  cmd_eval->add_option("--report", ev_report, "machine-readable report path");
  cmd_eval->add_option("--per-query", ev_csv, "per-query CSV path");

  // rerank-eval
  auto* cmd_rerank = app.add_subcommand("rerank-eval", "rerank the top of a first-stage run");
  std::string rr_run, rr_corpus, rr_queries, rr_out, rr_tag = "rerank";
  long long rr_depth = 100, rr_k = 10;
  cmd_rerank->add_option("--run", rr_run, "first-stage run file")->required();
  cmd_rerank->add_option("--corpus", rr_corpus, "corpus (jsonl)")->required();
  cmd_rerank->add_option("--queries", rr_queries, "queries (jsonl)")->required();
  cmd_rerank->add_option("--out", rr_out, "re-ranked run output")->required();
  cmd_rerank->add_option("--rerank-depth", rr_depth, "entries re-scored per query");
  cmd_rerank->add_option("--k", rr_k, "entries kept per query");
  cmd_rerank->add_option("--tag", rr_tag, "run tag");

  // consistency
  auto* cmd_consistency = app.add_subcommand("consistency", "Spearman consistency analysis");
  std::string cs_ranks_a, cs_ranks_b, cs_scores_a, cs_scores_b, cs_per_query;
  long long cs_resample = 0, cs_trials = 30;
  cmd_consistency->add_option("--ranks-a", cs_ranks_a, "comma-separated ranks");
  cmd_consistency->add_option("--ranks-b", cs_ranks_b, "comma-separated ranks");
  cmd_consistency->add_option("--scores-a", cs_scores_a, "JSON {model: score}");
  cmd_consistency->add_option("--scores-b", cs_scores_b, "JSON {model: score} (reference)");
  cmd_consistency->add_option("--per-query", cs_per_query, "JSON {model: {query: score}}");
  cmd_consistency->add_option("--resample", cs_resample, "sample size for robustness trials");
  cmd_consistency->add_option("--trials", cs_trials, "number of robustness trials");

  // diversity
  auto* cmd_diversity = app.add_subcommand("diversity", "LLM-label query type or style");
  std::string dv_queries, dv_facet = "type", dv_out;
  cmd_diversity->add_option("--queries", dv_queries, "queries (jsonl)")->required();
  cmd_diversity->add_option("--facet", dv_facet, "type | style");
  cmd_diversity->add_option("--out", dv_out, "labels TSV output");

  // similarity
  auto* cmd_similarity = app.add_subcommand("similarity", "weighted-Jaccard corpus similarity");
  std::vector<std::string> sim_corpora;
  std::string sim_out;
  cmd_similarity->add_option("--corpora", sim_corpora, "two or more corpus files")->expected(-2);
  cmd_similarity->add_option("--out", sim_out, "matrix CSV output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ctx.finalize();

    if (cmd_prepare->parsed()) {
      ctx.print_effective("prepare");
      ab::cli::PrepareOptions options;
      options.task = prepare_task.empty() ? ctx.task()
                                          : ab::task_from_string(prepare_task);
      options.input = prepare_input;
      options.output = prepare_output;
      options.tokenizer_name = ctx.tokenizer_name();
      const json& p = ctx.config.at("prepare");
      options.min_tokens = min_tokens >= 0
                               ? static_cast<std::size_t>(min_tokens)
                               : p.at("min_tokens").get<std::size_t>();
      if (max_tokens == 0) {
        options.max_tokens = ab::corpus::kNoMaxTokens;
      } else if (max_tokens > 0) {
        options.max_tokens = static_cast<std::size_t>(max_tokens);
      } else {
        options.max_tokens = p.at("max_tokens").get<std::size_t>();
      }
      options.chunk_size = chunk_size > 0 ? static_cast<std::size_t>(chunk_size)
                                          : p.at("chunk_size").get<std::size_t>();
      options.overlap = overlap >= 0 ? static_cast<std::size_t>(overlap)
                                     : p.at("overlap").get<std::size_t>();
      const auto outcome = ab::cli::run_prepare_pipeline(options);
      std::cout << "prepared " << outcome.output_docs << " of "
                << outcome.input_docs << " documents (avg "
                << std::fixed << std::setprecision(1) << outcome.avg_tokens
                << " tokens)\n";
      return 0;
    }

    if (cmd_generate->parsed()) {
      ctx.print_effective("generate");
      ab::cli::GenerateOptions options;
      options.config = generation_config_from(ctx);
      if (gen_n > 0) options.config.n_queries = static_cast<int>(gen_n);
      options.corpus_path = gen_corpus;
      options.out_dir = gen_out_dir;
      options.workers = ctx.workers();
      options.dry_run = ctx.dry_run;
      const ab::gen::PromptLibrary prompts = ctx.prompts();
      if (options.dry_run) {
        // Dry runs validate inputs and never touch a provider; the local
        // mock exists only to satisfy the signature.
        ab::providers::PipelineChatMock unused;
        const auto outcome =
            ab::cli::run_generate_pipeline(options, unused, prompts);
        std::cout << "dry run: would generate " << outcome.attempted
                  << " queries over " << outcome.corpus_docs << " documents\n";
        return 0;
      }
      ProviderSet providers = make_providers(ctx);
      ab::gen::GenerationReport report;
      const auto outcome =
          ab::cli::run_generate_pipeline(options, *providers.chat, prompts, &report);
      providers.flush();
      std::cout << "generated " << outcome.succeeded << " of "
                << outcome.attempted << " candidate queries over "
                << outcome.corpus_docs << " documents\n";
      for (const auto& [iteration, reason] : report.failures) {
        std::cerr << "iteration " << iteration << " failed: " << reason << "\n";
      }
      return 0;
    }

    if (cmd_qc->parsed()) {
      ctx.print_effective("qc");
      ab::cli::QcOptions options;
      options.task = ctx.task();
      options.candidates_dir = qc_candidates;
      options.seed_corpus_path = qc_seed_corpus;
      options.out_dir = qc_out_dir;
      const json& q = ctx.config.at("qc");
      options.correction.k = q.at("recall_k").get<int>();
      options.correction.threshold_hard_negative =
          q.at("threshold_hard_negative").get<int>();
      options.correction.threshold_other = q.at("threshold_other").get<int>();
      options.correction.workers = ctx.workers();
      options.dev_fraction = q.at("dev_fraction").get<double>();
      options.longdoc_assignment = q.at("longdoc_dev").get<bool>()
                                       ? ab::SplitKind::Dev
                                       : ab::SplitKind::Test;
      options.seed = ctx.seed();
      options.dry_run = ctx.dry_run;
      options.resume = qc_resume;
      const ab::gen::PromptLibrary prompts = ctx.prompts();
      if (options.dry_run) {
        ab::providers::PipelineChatMock no_chat;
        ab::providers::HashingEmbeddingProvider no_embed;
        ab::providers::TokenOverlapReranker no_rerank;
        std::vector<ab::providers::RerankProvider*> no_rerankers{&no_rerank};
        const auto outcome = ab::cli::run_qc_pipeline(options, no_chat, no_embed,
                                                      no_rerankers, prompts);
        std::cout << "dry run: " << outcome.candidate_queries
                  << " candidate queries ready for QC\n";
        return 0;
      }
      ProviderSet providers = make_providers(ctx);
      const auto outcome =
          ab::cli::run_qc_pipeline(options, *providers.chat, *providers.embed,
                                   providers.rerankers, prompts);
      providers.flush();
      std::cout << "qc: " << outcome.candidate_queries << " candidates -> "
                << outcome.kept_after_filter << " after filtering -> "
                << outcome.final_queries << " final queries; corpus "
                << outcome.final_corpus_docs << " docs, "
                << outcome.final_positives << " positive / "
                << outcome.final_negatives << " negative labels\n";
      return 0;
    }

    if (bm25_index->parsed()) {
      ctx.print_effective("bm25 index");
      const ab::Tokenizer tokenizer(ctx.tokenizer_name());
      const auto corpus = ab::corpus::read_corpus(bi_corpus);
      const auto index = ab::eval::bm25_build(corpus, tokenizer, bm25_k1, bm25_b);
      ab::eval::save_bm25_index(index, bi_out);
      std::cout << "indexed " << index.doc_count() << " documents, "
                << index.postings.size() << " terms\n";
      return 0;
    }

    if (bm25_search->parsed()) {
      ctx.print_effective("bm25 search");
      const auto index = ab::eval::load_bm25_index(bs_index);
      const ab::Tokenizer tokenizer(index.tokenizer_name);
      const auto queries = ab::corpus::read_queries(bs_queries);
      std::map<std::string, ab::RankedList> runs;
      for (const ab::Query& query : queries) {
        runs[query.id] = ab::eval::bm25_search(index, query.id, query.text,
                                               tokenizer,
                                               static_cast<int>(bs_k));
      }
      ab::eval::write_run_file(runs, bs_out, bs_tag);
      std::cout << "searched " << queries.size() << " queries\n";
      return 0;
    }

    if (cmd_eval->parsed()) {
      ctx.print_effective("eval");
      const auto bundle = ab::corpus::read_bundle(ev_bundle);
      const auto runs = ab::eval::read_run_file(ev_run);
      const ab::Task task =
          ev_task.empty() ? ctx.task() : ab::task_from_string(ev_task);
      const auto report = ab::eval::evaluate_run(
          runs, bundle, task, ab::eval::split_selector_from_string(ev_split),
          static_cast<int>(ev_k));
      const std::string metric_name =
          ab::eval::to_string(report.metric, report.k);
      std::cout << "metric      queries  mean\n";
      std::cout << std::left << std::setw(12) << metric_name << std::setw(9)
                << report.per_query.size() << std::fixed
                << std::setprecision(4) << report.mean << "\n";
      if (!report.missing_queries.empty()) {
        std::cout << "missing from run: " << report.missing_queries.size()
                  << " queries (scored 0)\n";
      }
      if (report.unknown_doc_entries > 0) {
        std::cout << "ignored " << report.unknown_doc_entries
                  << " entries referencing unknown docs\n";
      }
      if (!ev_report.empty()) ab::eval::write_metric_report(report, ev_report);
      if (!ev_csv.empty()) ab::eval::write_per_query_csv(report, ev_csv);
      return 0;
    }

    if (cmd_rerank->parsed()) {
      ctx.print_effective("rerank-eval");
      ProviderSet providers = make_providers(ctx);
      const auto first_stage = ab::eval::read_run_file(rr_run);
      std::unordered_map<std::string, std::string> doc_texts;
      ab::corpus::for_each_document(rr_corpus, [&](ab::Document&& doc) {
        doc_texts[doc.id] = std::move(doc.text);
      });
      std::unordered_map<std::string, std::string> query_texts;
      for (const ab::Query& query : ab::corpus::read_queries(rr_queries)) {
        query_texts[query.id] = query.text;
      }
      const auto outcome = ab::eval::rerank_eval(
          first_stage, *providers.rerankers.front(), doc_texts, query_texts,
          static_cast<int>(rr_depth), static_cast<int>(rr_k));
      ab::eval::write_run_file(outcome.runs, rr_out, rr_tag);
      providers.flush();
      std::cout << "reranked " << outcome.runs.size() << " queries";
      if (!outcome.failed_queries.empty()) {
        std::cout << " (" << outcome.failed_queries.size()
                  << " kept first-stage order after provider failure)";
      }
      std::cout << "\n";
      return 0;
    }

    if (cmd_consistency->parsed()) {
      ctx.print_effective("consistency");
      if (!cs_ranks_a.empty() || !cs_ranks_b.empty()) {
        if (cs_ranks_a.empty() || cs_ranks_b.empty()) {
          throw ab::ConfigError("--ranks-a and --ranks-b must come together");
        }
        const auto result = ab::eval::spearman(parse_rank_list(cs_ranks_a),
                                               parse_rank_list(cs_ranks_b));
        std::cout << "spearman rho = " << std::fixed << std::setprecision(4)
                  << result.rho << " (p = " << std::scientific
                  << std::setprecision(2) << result.p_value << ")\n";
        return 0;
      }
      if (!cs_per_query.empty()) {
        if (cs_scores_b.empty() || cs_resample <= 0) {
          throw ab::ConfigError(
              "--per-query needs --scores-b (reference) and --resample");
        }
        std::ifstream in(cs_per_query);
        if (!in) throw ab::InputError("cannot open: " + cs_per_query);
        json j = json::parse(in, nullptr, false);
        if (j.is_discarded()) throw ab::InputError("per-query file is not JSON");
        std::map<std::string, std::map<std::string, double>> per_query;
        for (const auto& [model, scores] : j.items()) {
          for (const auto& [query_id, value] : scores.items()) {
            per_query[model][query_id] = value.get<double>();
          }
        }
        const auto report = ab::eval::robustness_resample(
            per_query, read_scores_json(cs_scores_b),
            static_cast<std::size_t>(cs_resample),
            static_cast<int>(cs_trials), ctx.seed());
        std::cout << "trial  rho      p\n" << std::fixed;
        for (std::size_t i = 0; i < report.trials.size(); ++i) {
          std::cout << std::setw(5) << i + 1 << "  " << std::setprecision(4)
                    << report.trials[i].rho << "  " << std::scientific
                    << std::setprecision(2) << report.trials[i].p_value
                    << std::fixed << "\n";
        }
        std::cout << "mean rho = " << std::setprecision(4) << report.mean_rho
                  << " (mean p = " << std::scientific << std::setprecision(2)
                  << report.mean_p << ")\n";
        return 0;
      }
      if (cs_scores_a.empty() || cs_scores_b.empty()) {
        throw ab::ConfigError(
            "consistency needs --ranks-a/--ranks-b or --scores-a/--scores-b");
      }
      const auto report = ab::eval::consistency_analysis(
          read_scores_json(cs_scores_a), read_scores_json(cs_scores_b));
      std::cout << "model  rank_a  rank_b\n";
      for (std::size_t i = 0; i < report.model_ids.size(); ++i) {
        std::cout << report.model_ids[i] << "  " << report.ranks_a[i] << "  "
                  << report.ranks_b[i] << "\n";
      }
      std::cout << "spearman rho = " << std::fixed << std::setprecision(4)
                << report.rho << " (p = " << std::scientific
                << std::setprecision(2) << report.p_value << ")\n";
      return 0;
    }

    if (cmd_diversity->parsed()) {
      ctx.print_effective("diversity");
      ProviderSet providers = make_providers(ctx);
      const auto queries = ab::corpus::read_queries(dv_queries);
      const auto facet = dv_facet == "style" ? ab::eval::DiversityFacet::Style
                                             : ab::eval::DiversityFacet::Type;
      const auto labels = ab::eval::label_query_diversity(
          queries, *providers.chat, facet, ctx.prompts());
      providers.flush();
      const auto distribution = ab::eval::label_distribution(labels);
      std::cout << "label  fraction\n" << std::fixed << std::setprecision(4);
      for (const auto& [label, fraction] : distribution) {
        std::cout << label << "  " << fraction << "\n";
      }
      if (!dv_out.empty()) {
        std::ofstream out(dv_out, std::ios::binary | std::ios::trunc);
        if (!out) throw ab::InputError("cannot write: " + dv_out);
        out << "query-id\tlabel\n";
        for (const auto& [query_id, label] : labels) {
          out << query_id << '\t' << label << '\n';
        }
      }
      return 0;
    }

    if (cmd_similarity->parsed()) {
      ctx.print_effective("similarity");
      if (sim_corpora.size() < 2) {
        throw ab::ConfigError("similarity needs at least two corpora");
      }
      const ab::Tokenizer tokenizer(ctx.tokenizer_name());
      std::vector<std::vector<ab::Document>> corpora;
      for (const std::string& path : sim_corpora) {
        corpora.push_back(ab::corpus::read_corpus(path));
      }
      std::vector<std::vector<double>> matrix(
          corpora.size(), std::vector<double>(corpora.size(), 1.0));
      for (std::size_t i = 0; i < corpora.size(); ++i) {
        for (std::size_t j = i + 1; j < corpora.size(); ++j) {
          matrix[i][j] = matrix[j][i] =
              ab::eval::weighted_jaccard(corpora[i], corpora[j], tokenizer);
        }
      }
      std::cout << std::fixed << std::setprecision(4);
      for (std::size_t i = 0; i < corpora.size(); ++i) {
        for (std::size_t j = 0; j < corpora.size(); ++j) {
          std::cout << matrix[i][j] << (j + 1 < corpora.size() ? ' ' : '\n');
        }
      }
      if (!sim_out.empty()) {
        std::ofstream out(sim_out, std::ios::binary | std::ios::trunc);
        if (!out) throw ab::InputError("cannot write: " + sim_out);
        for (std::size_t i = 0; i < corpora.size(); ++i) {
          for (std::size_t j = 0; j < corpora.size(); ++j) {
            out << matrix[i][j] << (j + 1 < corpora.size() ? ',' : '\n');
          }
        }
      }
      return 0;
    }

    return 2;
  } catch (const ab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
