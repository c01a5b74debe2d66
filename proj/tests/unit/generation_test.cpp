#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "airbench/corpus/io.hpp"
#include "airbench/generator/loop.hpp"
#include "airbench/generator/steps.hpp"
#include "airbench/providers/mock.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace airbench;
using namespace airbench::gen;
using providers::PipelineChatMock;
using providers::ScriptedChatProvider;

namespace {
const PromptLibrary& prompts() {
  static const PromptLibrary lib = PromptLibrary::defaults();
  return lib;
}
}  // namespace

TEST_CASE("generate_characters parses the scripted fixture") {
  ScriptedChatProvider chat;
  chat.enqueue("```\nlibrarian\nnurse\npilot\n```");
  const Document doc = fixtures::make_doc("d0", 20, 1);
  CHECK(generate_characters(doc, chat, prompts()) ==
        std::vector<std::string>{"librarian", "nurse", "pilot"});
}

TEST_CASE("empty character replies are parse errors") {
  ScriptedChatProvider chat;
  chat.enqueue("");
  const Document doc = fixtures::make_doc("d0", 20, 1);
  CHECK_THROWS_AS(generate_characters(doc, chat, prompts()), ParseError);
}

TEST_CASE("generate_scenario returns the first usable line") {
  ScriptedChatProvider chat;
  chat.enqueue("```\npreparing a briefing\n```");
  const Document doc = fixtures::make_doc("d0", 20, 1);
  CHECK(generate_scenario(doc, "analyst", chat, prompts()) ==
        "preparing a briefing");
  ScriptedChatProvider empty;
  empty.enqueue("```\n```");
  CHECK_THROWS_AS(generate_scenario(doc, "analyst", empty, prompts()),
                  ParseError);
}

TEST_CASE("recorded transcripts replay through the generation steps") {
  const Document doc = fixtures::make_doc("d0", 20, 1);
  const std::string raw_reply =
      "Of course. Possible readers:\n```\n1. field biologist\n2. park "
      "ranger\n3. science teacher\n```";
  // the hand-parse of that transcript reply
  const std::vector<std::string> hand_parsed{"field biologist", "park ranger",
                                             "science teacher"};

  providers::Transcript transcript;
  {
    ScriptedChatProvider live;
    live.enqueue(raw_reply);
    live.enqueue("```\nguiding a school visit\n```");
    providers::RecordingChatProvider recorder(live, transcript);
    CHECK(generate_characters(doc, recorder, prompts()) == hand_parsed);
    CHECK(generate_scenario(doc, "park ranger", recorder, prompts()) ==
          "guiding a school visit");
  }
  providers::ReplayChatProvider replay(transcript);
  CHECK(generate_characters(doc, replay, prompts()) == hand_parsed);
  CHECK(generate_scenario(doc, "park ranger", replay, prompts()) ==
        "guiding a school visit");
}

TEST_CASE("query prompts embed length, type, and info instructions only") {
  ScriptedChatProvider chat;
  chat.enqueue("```\nwhat is out there\n```");
  const Document doc = fixtures::make_doc("d0", 20, 1);
  QueryAttributes attrs;
  attrs.length_bucket = LengthBucket::From10To20;
  attrs.query_type = QueryType::Question;
  attrs.info_type = InfoType::Partial;
  attrs.style = Style::Academic;
  const std::string query = generate_query(doc, "analyst", "briefing", attrs,
                                           Task::QA, chat, prompts());
  CHECK(query == "what is out there");
  REQUIRE(chat.prompts().size() == 1);
  const std::string& prompt = chat.prompts()[0];
  CHECK(prompt.find("10 to 20 words") != std::string::npos);
  CHECK(prompt.find("a question") != std::string::npos);
  CHECK(prompt.find("partial information") != std::string::npos);
  // style is applied at rewrite, not here
  CHECK(prompt.find("academic") == std::string::npos);
}

TEST_CASE("claim with a short length bucket violates the precondition") {
  ScriptedChatProvider chat;
  const Document doc = fixtures::make_doc("d0", 20, 1);
  QueryAttributes attrs;
  attrs.query_type = QueryType::Claim;
  attrs.length_bucket = LengthBucket::Under5;
  CHECK_THROWS_AS(generate_query(doc, "c", "s", attrs, Task::QA, chat,
                                 prompts()),
                  ConfigError);
}

TEST_CASE("rewrite accepts the first candidate under a vacuous threshold") {
  ScriptedChatProvider chat;
  chat.enqueue("```\nrephrased query\n```");
  GenerationConfig config;
  config.rewrite_overlap_threshold = 1.0;
  config.rewrite_max_iters = 3;
  const Document doc = fixtures::make_doc("d0", 30, 2);
  const RewriteResult result =
      rewrite_query("original query", doc, Style::Concise, chat, prompts(),
                    config);
  CHECK(result.final_text == "rephrased query");
  CHECK(result.history ==
        std::vector<std::string>{"original query", "rephrased query"});
  CHECK(chat.prompts().size() == 1);
}

TEST_CASE("rewrite stops immediately on zero overlap") {
  ScriptedChatProvider chat;
  chat.enqueue("```\nxylophone zebra\n```");
  GenerationConfig config;
  config.rewrite_overlap_threshold = 0.6;
  config.rewrite_max_iters = 5;
  Document doc;
  doc.id = "d0";
  doc.text = "river summit glacier";
  const RewriteResult result = rewrite_query("river summit", doc,
                                             Style::Casual, chat, prompts(),
                                             config);
  CHECK(result.final_text == "xylophone zebra");
  CHECK(chat.prompts().size() == 1);
}

TEST_CASE("rewrite stops at the first candidate under the threshold") {
  // doc tokens: {river, summit, glacier, harbor}
  Document doc;
  doc.id = "d0";
  doc.text = "river summit glacier harbor";
  const Tokenizer tok;
  const std::vector<std::string> candidates{
      "river summit glacier",   // J = 3/4
      "river summit harbor up", // J = 3/5
      "river between down up",  // J = 1/7
      "disjoint words only"};   // never reached
  ScriptedChatProvider chat;
  for (const auto& c : candidates) chat.enqueue("```\n" + c + "\n```");

  GenerationConfig config;
  config.rewrite_overlap_threshold = 0.3;
  config.rewrite_max_iters = 4;
  const RewriteResult result = rewrite_query(
      "river summit glacier harbor", doc, Style::Formal, chat, prompts(),
      config);

  // oracle: first candidate whose token-set Jaccard with the doc is < 0.3
  std::size_t expected_stop = candidates.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (oracle::token_set_jaccard(tok.tokenize(candidates[i]),
                                  tok.tokenize(doc.text)) < 0.3) {
      expected_stop = i;
      break;
    }
  }
  REQUIRE(expected_stop == 2);
  CHECK(result.final_text == candidates[expected_stop]);
  CHECK(chat.prompts().size() == expected_stop + 1);
  CHECK(result.history.size() == expected_stop + 2);  // input + candidates
}

TEST_CASE("rewrite falls back to the input when all rewrites are empty") {
  ScriptedChatProvider chat;
  chat.enqueue("");
  chat.enqueue("");
  chat.enqueue("");
  GenerationConfig config;
  const Document doc = fixtures::make_doc("d0", 30, 2);
  const RewriteResult result =
      rewrite_query("the query", doc, Style::Concise, chat, prompts(), config);
  CHECK(result.fell_back);
  CHECK(result.final_text == "the query");
  CHECK(result.history == std::vector<std::string>{"the query"});
}

TEST_CASE("long-doc tasks generate no hard negatives") {
  ScriptedChatProvider chat;  // must not be called
  GenerationConfig config;
  config.task = Task::LongDoc;
  RngStream rng(1);
  const Document doc = fixtures::make_doc("d0", 20, 1);
  const HardNegativeResult result = generate_hard_negatives(
      "q-0", "query", doc, chat, prompts(), config, rng);
  CHECK(result.docs.empty());
  CHECK(result.requested == 0);
  CHECK(chat.prompts().empty());
}

TEST_CASE("a fixed range produces ids q-0-hn-0..2") {
  ScriptedChatProvider chat;
  chat.enqueue("```\nneg one\nneg two\nneg three\n```");
  GenerationConfig config;
  config.hard_negative_range = {3, 3};
  RngStream rng(1);
  const Document doc = fixtures::make_doc("d0", 20, 1);
  const HardNegativeResult result = generate_hard_negatives(
      "q-0", "query", doc, chat, prompts(), config, rng);
  REQUIRE(result.docs.size() == 3);
  CHECK(result.docs[0].id == "q-0-hn-0");
  CHECK(result.docs[2].id == "q-0-hn-2");
  CHECK(result.docs[1].origin == DocOrigin::HardNegative);
  CHECK(!result.shortfall);
  REQUIRE(chat.prompts().size() == 1);
  CHECK(chat.prompts()[0].find("generate 3 hard negative") !=
        std::string::npos);
}

TEST_CASE("a shortfall is flagged but not fatal") {
  ScriptedChatProvider chat;
  chat.enqueue("```\nonly one\n```");
  GenerationConfig config;
  config.hard_negative_range = {3, 3};
  RngStream rng(1);
  const Document doc = fixtures::make_doc("d0", 20, 1);
  const HardNegativeResult result = generate_hard_negatives(
      "q-0", "query", doc, chat, prompts(), config, rng);
  CHECK(result.docs.size() == 1);
  CHECK(result.shortfall);
}

TEST_CASE("hard-negative counts are uniform over the range") {
  GenerationConfig config;
  config.hard_negative_range = {3, 7};
  std::map<int, int> counts;
  const int draws = 10000;
  const Document doc = fixtures::make_doc("d0", 20, 1);
  fixtures::FnChatProvider chat([](const std::string&) {
    return std::string(
        "```\nn0\nn1\nn2\nn3\nn4\nn5\nn6\nn7\nn8\nn9\n```");
  });
  for (int i = 0; i < draws; ++i) {
    RngStream rng(42, 0x686e, static_cast<std::uint64_t>(i));
    const HardNegativeResult result = generate_hard_negatives(
        "q", "query", doc, chat, prompts(), config, rng);
    ++counts[result.requested];
  }
  for (int m = 3; m <= 7; ++m) {
    CHECK_THAT(static_cast<double>(counts[m]) / draws,
               Catch::Matchers::WithinAbs(0.2, 0.015));
  }
}

TEST_CASE("a single mocked iteration books exactly one query") {
  PipelineChatMock chat;
  GenerationConfig config;
  config.n_queries = 1;
  config.rng_seed = 11;
  const auto corpus = fixtures::make_corpus(5, 40, 3);
  const CandidateSets sets =
      run_generation_loop(corpus, config, chat, prompts(), 1);
  REQUIRE(sets.queries.size() == 1);
  CHECK(sets.pos_qrels.size() == 1);
  CHECK(sets.pos_qrels[0].query_id == sets.queries[0].id);
  CHECK(sets.pos_qrels[0].doc_id == sets.queries[0].positive_doc_id);
  CHECK(sets.hard_negatives.size() == sets.neg_qrels.size());
  CHECK(sets.hard_negatives.size() >= 3);
  CHECK(sets.hard_negatives.size() <= 7);
  CHECK(sets.queries[0].rewrite_history.front() ==
        sets.queries[0].original_text);
  CHECK(sets.queries[0].rewrite_history.back() == sets.queries[0].text);
}

TEST_CASE("the loop is deterministic and worker-count independent") {
  PipelineChatMock chat;
  GenerationConfig config;
  config.n_queries = 50;
  config.rng_seed = 2024;
  const auto corpus = fixtures::make_corpus(30, 40, 9);

  const auto dir = fixtures::fresh_temp_dir("loop_det");
  const CandidateSets a =
      run_generation_loop(corpus, config, chat, prompts(), 1);
  corpus::write_candidates(a, dir / "a");
  const CandidateSets b =
      run_generation_loop(corpus, config, chat, prompts(), 1);
  corpus::write_candidates(b, dir / "b");
  const CandidateSets c =
      run_generation_loop(corpus, config, chat, prompts(), 8);
  corpus::write_candidates(c, dir / "c");

  for (const char* file :
       {"queries.jsonl", "positives.jsonl", "hard_negatives.jsonl",
        "qrels.tsv"}) {
    const std::string bytes_a = fixtures::slurp(dir / "a" / file);
    CHECK(bytes_a == fixtures::slurp(dir / "b" / file));
    CHECK(bytes_a == fixtures::slurp(dir / "c" / file));
    CHECK(!bytes_a.empty());
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("candidate sets close over their own references") {
  PipelineChatMock chat;
  GenerationConfig config;
  config.n_queries = 12;
  config.rng_seed = 77;
  const auto corpus = fixtures::make_corpus(8, 40, 17);
  const CandidateSets sets =
      run_generation_loop(corpus, config, chat, prompts(), 4);

  std::set<std::string> query_ids, positive_ids, negative_ids;
  for (const Query& query : sets.queries) query_ids.insert(query.id);
  for (const Document& doc : sets.positives) positive_ids.insert(doc.id);
  for (const Document& doc : sets.hard_negatives) negative_ids.insert(doc.id);
  for (const Qrel& qrel : sets.pos_qrels) {
    CHECK(query_ids.count(qrel.query_id) == 1);
    CHECK(positive_ids.count(qrel.doc_id) == 1);
    CHECK(qrel.relevance == 1);
  }
  for (const Qrel& qrel : sets.neg_qrels) {
    CHECK(query_ids.count(qrel.query_id) == 1);
    CHECK(negative_ids.count(qrel.doc_id) == 1);
    CHECK(qrel.relevance == 0);
  }
  // every query has exactly one positive label
  CHECK(sets.pos_qrels.size() == sets.queries.size());
  for (const Query& query : sets.queries) {
    CHECK(positive_ids.count(query.positive_doc_id) == 1);
  }
}

TEST_CASE("positives are drawn without replacement until exhaustion") {
  PipelineChatMock chat;
  GenerationConfig config;
  config.n_queries = 10;
  config.rng_seed = 5;
  const auto corpus = fixtures::make_corpus(10, 40, 21);
  const CandidateSets sets =
      run_generation_loop(corpus, config, chat, prompts(), 4);
  REQUIRE(sets.queries.size() == 10);
  std::set<std::string> used;
  for (const Query& query : sets.queries) used.insert(query.positive_doc_id);
  CHECK(used.size() == 10);  // every corpus doc exactly once
}

TEST_CASE("after exhausting the corpus, positives are drawn with replacement") {
  PipelineChatMock chat;
  GenerationConfig config;
  config.n_queries = 10;
  config.rng_seed = 6;
  const auto corpus = fixtures::make_corpus(3, 40, 19);
  const CandidateSets sets =
      run_generation_loop(corpus, config, chat, prompts(), 2);
  REQUIRE(sets.queries.size() == 10);
  std::set<std::string> first_three;
  for (int i = 0; i < 3; ++i) {
    first_three.insert(sets.queries[static_cast<std::size_t>(i)]
                           .positive_doc_id);
  }
  CHECK(first_three.size() == 3);  // without replacement while it lasts
  std::set<std::string> corpus_ids;
  for (const Document& doc : corpus) corpus_ids.insert(doc.id);
  for (const Query& query : sets.queries) {
    CHECK(corpus_ids.count(query.positive_doc_id) == 1);
  }
}

TEST_CASE("failing iterations are skipped and reported") {
  int character_calls = 0;
  fixtures::FnChatProvider chat([&](const std::string& prompt) -> std::string {
    PipelineChatMock inner;
    // fail the second iteration's character step
    if (prompt.find("list 3 distinct characters") != std::string::npos &&
        ++character_calls == 2) {
      throw ProviderError("scripted outage");
    }
    return inner.complete(prompt, {});
  });
  GenerationConfig config;
  config.n_queries = 3;
  config.rng_seed = 7;
  const auto corpus = fixtures::make_corpus(5, 40, 13);
  GenerationReport report;
  const CandidateSets sets =
      run_generation_loop(corpus, config, chat, prompts(), 1, &report);
  CHECK(report.attempted == 3);
  CHECK(static_cast<int>(sets.queries.size()) == report.succeeded);
  CHECK(report.succeeded < 3);
  CHECK(!report.failures.empty());
}
