#pragma once

#include <filesystem>
#include <string>
#include <unordered_set>
#include <vector>

#include "airbench/corpus/chunker.hpp"
#include "airbench/corpus/filter.hpp"
#include "airbench/corpus/io.hpp"
#include "airbench/corpus/stats.hpp"
#include "airbench/errors.hpp"
#include "airbench/generator/loop.hpp"
#include "airbench/qc/assemble.hpp"
#include "airbench/qc/correct.hpp"
#include "airbench/qc/query_filter.hpp"
#include "airbench/qc/split.hpp"
#include "airbench/tokenizer.hpp"
#include "airbench/types.hpp"

namespace airbench::cli {

// --- prepare -----------------------------------------------------------------

struct PrepareOptions {
  Task task = Task::QA;
  std::filesystem::path input;
  std::filesystem::path output;
  std::size_t min_tokens = 20;
  std::size_t max_tokens = 8192;
  std::size_t chunk_size = 200;
  std::size_t overlap = 50;
  std::string tokenizer_name = "unicode";
};

struct PrepareOutcome {
  std::size_t input_docs = 0;
  std::size_t output_docs = 0;
  double avg_tokens = 0.0;
};

/// Raw-corpus reader for `prepare`: like read_corpus, but records without
/// an `_id` get one minted as "<source>-<counter>" (source = input file
/// stem), since raw datasets often ship without stable ids.
inline std::vector<Document> read_raw_corpus(
    const std::filesystem::path& path) {
  const std::string source = path.stem().string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open for reading: " + path.string());
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  std::size_t counter = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto j = corpus::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw ParseError("malformed record in " + path.string(), line_no);
    }
    if (!j.contains("_id")) j["_id"] = source + "-" + std::to_string(counter);
    ++counter;
    Document doc;
    try {
      doc = corpus::document_from_json(j);
    } catch (const corpus::json::exception& e) {
      throw ParseError(std::string("bad record in ") + path.string() + ": " +
                           e.what(),
                       line_no);
    }
    if (!seen.insert(doc.id).second) {
      throw IntegrityError("duplicate document id in " + path.string() + ": " +
                           doc.id);
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

/// QA: token-length filter over the raw documents. Long-Doc: sliding-window
/// chunking of every input document. Both run the (identity) redaction hook.
inline PrepareOutcome run_prepare_pipeline(const PrepareOptions& options) {
  const Tokenizer tokenizer(options.tokenizer_name);
  const std::vector<Document> raw = read_raw_corpus(options.input);
  std::vector<Document> prepared;
  if (options.task == Task::QA) {
    prepared = corpus::filter_documents(raw, options.min_tokens,
                                        options.max_tokens, tokenizer);
  } else {
    for (const Document& doc : raw) {
      std::vector<Document> chunks = corpus::chunk_long_document(
          doc.id, doc.title, doc.text, options.chunk_size, options.overlap,
          tokenizer);
      for (Document& chunk : chunks) prepared.push_back(std::move(chunk));
    }
  }
  for (Document& doc : prepared) doc = corpus::redact_document(std::move(doc));
  corpus::write_corpus(prepared, options.output);

  PrepareOutcome outcome;
  outcome.input_docs = raw.size();
  outcome.output_docs = prepared.size();
  outcome.avg_tokens = corpus::summarize_corpus(prepared, tokenizer).avg_tokens;
  return outcome;
}

// --- generate ----------------------------------------------------------------

struct GenerateOptions {
  gen::GenerationConfig config;
  std::filesystem::path corpus_path;
  std::filesystem::path out_dir;
  int workers = 8;
  bool dry_run = false;
};

struct GenerateOutcome {
  bool dry_run = false;
  int attempted = 0;
  int succeeded = 0;
  std::size_t corpus_docs = 0;
};

/// Candidate generation against a prepared corpus. Dry runs validate the
/// inputs and report the plan without any provider call or output file.
inline GenerateOutcome run_generate_pipeline(const GenerateOptions& options,
                                             providers::ChatProvider& chat,
                                             const gen::PromptLibrary& prompts,
                                             gen::GenerationReport* report
                                             = nullptr) {
  options.config.validate();
  const std::vector<Document> corpus = corpus::read_corpus(options.corpus_path);
  if (corpus.empty()) throw InputError("generate: prepared corpus is empty");

  GenerateOutcome outcome;
  outcome.corpus_docs = corpus.size();
  outcome.attempted = options.config.n_queries;
  if (options.dry_run) {
    outcome.dry_run = true;
    return outcome;
  }
  gen::GenerationReport local_report;
  if (report == nullptr) report = &local_report;
  const CandidateSets sets =
      gen::run_generation_loop(corpus, options.config, chat, prompts,
                               options.workers, report);
  outcome.succeeded = static_cast<int>(sets.queries.size());
  if (outcome.succeeded == 0) {
    std::string reason = report->failures.empty()
                             ? std::string("unknown")
                             : report->failures.front().second;
    throw ProviderError("every generation iteration failed; first failure: " +
                        reason);
  }
  corpus::write_candidates(sets, options.out_dir);
  return outcome;
}

// --- qc ------------------------------------------------------------------------

struct QcOptions {
  Task task = Task::QA;
  std::filesystem::path candidates_dir;
  std::filesystem::path seed_corpus_path;
  std::filesystem::path out_dir;
  qc::CorrectionOptions correction;
  double dev_fraction = 0.2;
  SplitKind longdoc_assignment = SplitKind::Test;
  std::uint64_t seed = 0;
  bool dry_run = false;
  bool resume = false;
};

struct QcOutcome {
  bool dry_run = false;
  std::size_t candidate_queries = 0;
  std::size_t kept_after_filter = 0;
  std::size_t final_queries = 0;
  std::size_t final_corpus_docs = 0;
  std::size_t final_positives = 0;
  std::size_t final_negatives = 0;
};

/// The full quality-control stage: query filtering, label correction,
/// dev/test split, bundle assembly. The QC report doubles as a checkpoint;
/// with `resume`, queries already decided in it are not re-judged.
inline QcOutcome run_qc_pipeline(
    const QcOptions& options, providers::ChatProvider& chat,
    providers::EmbeddingProvider& embedder,
    const std::vector<providers::RerankProvider*>& rerankers,
    const gen::PromptLibrary& prompts) {
  const CandidateSets cands = corpus::read_candidates(options.candidates_dir);
  const std::vector<Document> seed_corpus =
      corpus::read_corpus(options.seed_corpus_path);

  QcOutcome outcome;
  outcome.candidate_queries = cands.queries.size();
  if (options.dry_run) {
    outcome.dry_run = true;
    return outcome;
  }

  std::filesystem::create_directories(options.out_dir);
  const std::filesystem::path report_path =
      options.out_dir / "qc_report.jsonl";
  if (!options.resume && std::filesystem::exists(report_path)) {
    std::filesystem::remove(report_path);
  }
  qc::QcReport report(report_path);

  // Query-filter phase, skipping queries already decided in the report.
  std::unordered_set<std::string> recorded_keep;
  std::unordered_set<std::string> recorded_discard;
  for (const qc::QcRecord& record : report.records()) {
    if (record.action == "keep_query") recorded_keep.insert(record.query_id);
    if (record.action == "discard_query") {
      recorded_discard.insert(record.query_id);
    }
  }
  CandidateSets undecided = cands;
  std::erase_if(undecided.queries, [&](const Query& query) {
    return recorded_keep.count(query.id) != 0 ||
           recorded_discard.count(query.id) != 0;
  });
  std::unordered_set<std::string> kept_ids = recorded_keep;
  if (!undecided.queries.empty()) {
    const CandidateSets newly_kept = qc::filter_low_quality_queries(
        undecided, chat, prompts, &report, options.correction.workers);
    for (const Query& query : newly_kept.queries) kept_ids.insert(query.id);
  }
  const CandidateSets filtered = qc::retain_queries(cands, kept_ids);
  outcome.kept_after_filter = filtered.queries.size();

  const qc::CorrectionResume resume = qc::resume_from_report(report);
  const CandidateSets corrected = qc::correct_labels(
      filtered, seed_corpus, embedder, rerankers, chat, prompts,
      options.correction, &report, options.resume ? &resume : nullptr);

  const SplitAssignment split =
      qc::split_queries(corrected.queries, options.task, options.dev_fraction,
                        options.seed, options.longdoc_assignment);
  const DatasetBundle bundle =
      qc::assemble_dataset(seed_corpus, corrected, split);
  corpus::write_bundle(bundle, options.out_dir);

  outcome.final_queries = bundle.queries.size();
  outcome.final_corpus_docs = bundle.corpus.size();
  for (const Qrel& qrel : bundle.qrels) {
    if (qrel.relevance == 1) {
      ++outcome.final_positives;
    } else {
      ++outcome.final_negatives;
    }
  }
  return outcome;
}

}  // namespace airbench::cli
