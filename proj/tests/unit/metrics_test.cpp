#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "airbench/eval/metrics.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace airbench;
using eval::MetricReport;
using eval::evaluate_run;
using eval::ndcg_at_k;
using eval::recall_at_k;

namespace {

RankedList make_run(const std::string& qid,
                    const std::vector<std::string>& doc_ids) {
  RankedList run;
  run.query_id = qid;
  double score = static_cast<double>(doc_ids.size());
  for (const std::string& id : doc_ids) run.entries.emplace_back(id, score--);
  return run;
}

}  // namespace

TEST_CASE("a single positive at rank 1 is a perfect ranking") {
  const auto run = make_run("q", {"d1", "d2", "d3"});
  CHECK(ndcg_at_k(run, {"d1"}, 10) == 1.0);
}

TEST_CASE("positives at ranks 2 and 5 match the hand-evaluated formula") {
  const auto run = make_run("q", {"x1", "p1", "x2", "x3", "p2", "x4"});
  const double expected =
      (1.0 / std::log2(3.0) + 1.0 / std::log2(6.0)) /
      (1.0 + 1.0 / std::log2(3.0));
  const auto value = ndcg_at_k(run, {"p1", "p2"}, 10);
  REQUIRE(value.has_value());
  CHECK_THAT(*value, Catch::Matchers::WithinAbs(expected, 1e-12));
  CHECK_THAT(*value, Catch::Matchers::WithinAbs(0.6241, 1e-4));
}

TEST_CASE("no retrieved positive scores zero; no positives at all is excluded") {
  const auto run = make_run("q", {"x1", "x2"});
  CHECK(ndcg_at_k(run, {"p"}, 10) == 0.0);
  CHECK(!ndcg_at_k(run, {}, 10).has_value());
  CHECK(!recall_at_k(run, {}, 10).has_value());
}

TEST_CASE("recall@10 counts retrieved positives over P") {
  const auto full = make_run("q", {"p1", "p2", "p3"});
  CHECK(recall_at_k(full, {"p1", "p2", "p3"}, 10) == 1.0);
  const auto partial =
      make_run("q", {"p1", "x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8",
                     "x9", "p2"});
  CHECK(recall_at_k(partial, {"p1", "p2", "p3", "p4"}, 10) == 0.25);
}

TEST_CASE("metrics agree with the reference implementation on random runs") {
  std::mt19937 rng(1717);
  for (int round = 0; round < 100; ++round) {
    const int corpus_size = 2 + static_cast<int>(rng() % 49);
    std::vector<std::string> docs;
    for (int i = 0; i < corpus_size; ++i) {
      docs.push_back("d" + std::to_string(i));
    }
    std::shuffle(docs.begin(), docs.end(), rng);
    const int run_len = 1 + static_cast<int>(rng() % corpus_size);
    std::vector<std::string> run_docs(docs.begin(), docs.begin() + run_len);
    std::set<std::string> positives;
    const int p = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < p; ++i) {
      positives.insert(docs[rng() % docs.size()]);
    }
    const int k = 1 + static_cast<int>(rng() % 15);

    const auto run = make_run("q", run_docs);
    const auto ndcg = ndcg_at_k(run, positives, k);
    const auto recall = recall_at_k(run, positives, k);
    REQUIRE(ndcg.has_value());
    REQUIRE(recall.has_value());
    CHECK_THAT(*ndcg, Catch::Matchers::WithinAbs(
                          oracle::ndcg(run_docs, positives, k), 1e-12));
    CHECK_THAT(*recall, Catch::Matchers::WithinAbs(
                            oracle::recall(run_docs, positives, k), 1e-12));
  }
}

TEST_CASE("ndcg is 1 exactly when the top min(10, P) slots are all positive") {
  std::mt19937 rng(404);
  for (int round = 0; round < 200; ++round) {
    std::vector<std::string> docs;
    for (int i = 0; i < 20; ++i) docs.push_back("d" + std::to_string(i));
    std::shuffle(docs.begin(), docs.end(), rng);
    std::set<std::string> positives;
    const int p = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < p; ++i) positives.insert(docs[rng() % docs.size()]);
    const auto value = ndcg_at_k(make_run("q", docs), positives, 10);
    REQUIRE(value.has_value());
    CHECK(*value >= 0.0);
    CHECK(*value <= 1.0 + 1e-15);
    const std::size_t prefix =
        std::min<std::size_t>(10, positives.size());
    bool prefix_all_positive = true;
    for (std::size_t i = 0; i < prefix; ++i) {
      if (positives.count(docs[i]) == 0) prefix_all_positive = false;
    }
    CHECK((std::abs(*value - 1.0) < 1e-12) == prefix_all_positive);
  }
}

TEST_CASE("reordering below the cutoff never changes the metrics") {
  std::mt19937 rng(88);
  std::vector<std::string> docs;
  for (int i = 0; i < 30; ++i) docs.push_back("d" + std::to_string(i));
  const std::set<std::string> positives{"d2", "d7", "d15", "d25"};
  const auto base = ndcg_at_k(make_run("q", docs), positives, 10);
  const auto base_recall = recall_at_k(make_run("q", docs), positives, 10);
  for (int round = 0; round < 20; ++round) {
    auto permuted = docs;
    std::shuffle(permuted.begin() + 10, permuted.end(), rng);
    CHECK(ndcg_at_k(make_run("q", permuted), positives, 10) == base);
    CHECK(recall_at_k(make_run("q", permuted), positives, 10) == base_recall);
  }
}

namespace {

DatasetBundle tiny_bundle() {
  DatasetBundle bundle;
  for (int i = 0; i < 6; ++i) {
    bundle.corpus.push_back(fixtures::make_doc("d" + std::to_string(i), 8,
                                               static_cast<std::uint32_t>(i)));
  }
  for (int i = 0; i < 3; ++i) {
    Query query;
    query.id = "q" + std::to_string(i);
    query.text = "query";
    bundle.queries.push_back(query);
    bundle.split[query.id] = i == 0 ? SplitKind::Dev : SplitKind::Test;
  }
  bundle.qrels = {Qrel{"q0", "d0", 1}, Qrel{"q1", "d1", 1},
                  Qrel{"q1", "d2", 1}, Qrel{"q2", "d3", 1},
                  Qrel{"q2", "d4", 0}};
  return bundle;
}

}  // namespace

TEST_CASE("a perfect oracle run scores mean 1.0") {
  const DatasetBundle bundle = tiny_bundle();
  std::map<std::string, RankedList> runs;
  runs["q0"] = make_run("q0", {"d0"});
  runs["q1"] = make_run("q1", {"d1", "d2"});
  runs["q2"] = make_run("q2", {"d3"});
  const MetricReport report = evaluate_run(runs, bundle, Task::QA);
  CHECK(report.mean == 1.0);
  CHECK(report.per_query.size() == 3);
  CHECK(report.missing_queries.empty());
}

TEST_CASE("an empty run scores zero and flags every query as missing") {
  const DatasetBundle bundle = tiny_bundle();
  const MetricReport report = evaluate_run({}, bundle, Task::QA);
  CHECK(report.mean == 0.0);
  CHECK(report.missing_queries.size() == 3);
}

TEST_CASE("a fixture run matches its hand-scored report") {
  const DatasetBundle bundle = tiny_bundle();
  std::map<std::string, RankedList> runs;
  // q0: positive at rank 2 -> 1/log2(3)
  runs["q0"] = make_run("q0", {"d5", "d0"});
  // q1: one of two positives at rank 1 -> dcg 1, idcg 1 + 1/log2(3)
  runs["q1"] = make_run("q1", {"d1", "d5"});
  // q2: positive d3 at rank 3; d4 is labeled 0 -> dcg 1/2
  runs["q2"] = make_run("q2", {"d4", "d5", "d3"});
  const MetricReport report = evaluate_run(runs, bundle, Task::QA);
  CHECK_THAT(report.per_query.at("q0"),
             Catch::Matchers::WithinAbs(1.0 / std::log2(3.0), 1e-12));
  CHECK_THAT(report.per_query.at("q1"),
             Catch::Matchers::WithinAbs(1.0 / (1.0 + 1.0 / std::log2(3.0)),
                                        1e-12));
  CHECK_THAT(report.per_query.at("q2"),
             Catch::Matchers::WithinAbs(0.5, 1e-12));
  const double expected_mean =
      (1.0 / std::log2(3.0) + 1.0 / (1.0 + 1.0 / std::log2(3.0)) + 0.5) / 3.0;
  CHECK_THAT(report.mean, Catch::Matchers::WithinAbs(expected_mean, 1e-12));
}

TEST_CASE("long-doc bundles are scored with recall") {
  const DatasetBundle bundle = tiny_bundle();
  std::map<std::string, RankedList> runs;
  runs["q1"] = make_run("q1", {"d1", "d5"});
  const MetricReport report =
      evaluate_run(runs, bundle, Task::LongDoc, eval::SplitSelector::All);
  CHECK(report.metric == eval::Metric::RecallAtK);
  CHECK(report.per_query.at("q1") == 0.5);
}

TEST_CASE("unknown doc ids are ignored with a warning count") {
  const DatasetBundle bundle = tiny_bundle();
  std::map<std::string, RankedList> runs;
  runs["q0"] = make_run("q0", {"ghost", "d0"});
  const MetricReport report = evaluate_run(runs, bundle, Task::QA);
  CHECK(report.unknown_doc_entries == 1);
  CHECK(report.per_query.at("q0") == 1.0);  // ghost removed, d0 is rank 1
}

TEST_CASE("split selection restricts the scored queries") {
  const DatasetBundle bundle = tiny_bundle();
  std::map<std::string, RankedList> runs;
  runs["q0"] = make_run("q0", {"d0"});
  runs["q1"] = make_run("q1", {"d1"});
  runs["q2"] = make_run("q2", {"d3"});
  const MetricReport dev =
      evaluate_run(runs, bundle, Task::QA, eval::SplitSelector::Dev);
  CHECK(dev.per_query.size() == 1);
  CHECK(dev.per_query.count("q0") == 1);
  const MetricReport test =
      evaluate_run(runs, bundle, Task::QA, eval::SplitSelector::Test);
  CHECK(test.per_query.size() == 2);
}
