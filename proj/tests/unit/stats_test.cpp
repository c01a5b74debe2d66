#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "airbench/eval/stats.hpp"
#include "support/oracles.hpp"

using namespace airbench;
using eval::ConsistencyReport;
using eval::SpearmanResult;
using eval::consistency_analysis;
using eval::robustness_resample;
using eval::spearman;

namespace {

const std::vector<int> kReferenceRanks{1, 2,  3,  4,  5,  6,  7,  8, 9,
                                       10, 11, 12, 13, 14, 15, 16, 17};
const std::vector<int> kGeneratedWithQcRanks{1, 4,  5,  8,  3, 2, 10, 11, 9,
                                             7, 14, 13, 12, 6, 15, 16, 17};
const std::vector<int> kGeneratedWithoutQcRanks{2, 5,  6, 8,  4,  1, 10, 11, 13,
                                                7, 15, 9, 12, 3, 14, 16, 17};

}  // namespace

TEST_CASE("the published rank columns reproduce rho 0.8211 with p near 5e-5") {
  const SpearmanResult with_qc =
      spearman(kReferenceRanks, kGeneratedWithQcRanks);
  CHECK_THAT(with_qc.rho, Catch::Matchers::WithinAbs(0.8211, 1e-4));
  CHECK(with_qc.p_value >= 1e-5);
  CHECK(with_qc.p_value <= 1e-4);

  const SpearmanResult without_qc =
      spearman(kReferenceRanks, kGeneratedWithoutQcRanks);
  CHECK_THAT(without_qc.rho, Catch::Matchers::WithinAbs(0.6912, 1e-4));
  CHECK_THAT(without_qc.p_value, Catch::Matchers::WithinAbs(2e-3, 1e-3));
}

TEST_CASE("identical and reversed rankings hit the extremes") {
  const std::vector<int> v{1, 2, 3, 4, 5};
  const std::vector<int> r{5, 4, 3, 2, 1};
  CHECK(spearman(v, v).rho == 1.0);
  CHECK(spearman(v, r).rho == -1.0);
  CHECK(spearman(v, v).p_value > 0.0);
}

TEST_CASE("spearman matches a Pearson-on-ranks oracle") {
  const SpearmanResult result =
      spearman(kReferenceRanks, kGeneratedWithQcRanks);
  CHECK_THAT(result.rho,
             Catch::Matchers::WithinAbs(
                 oracle::spearman_rho(kReferenceRanks, kGeneratedWithQcRanks),
                 1e-12));
}

TEST_CASE("spearman is symmetric in its arguments") {
  const auto ab = spearman(kReferenceRanks, kGeneratedWithQcRanks);
  const auto ba = spearman(kGeneratedWithQcRanks, kReferenceRanks);
  CHECK(ab.rho == ba.rho);
  CHECK(ab.p_value == ba.p_value);
}

TEST_CASE("ties and malformed rank vectors are rejected") {
  CHECK_THROWS_AS(spearman({1, 2, 2, 4}, {1, 2, 3, 4}), InputError);
  CHECK_THROWS_AS(spearman({1, 2, 3}, {1, 2, 3, 4}), InputError);
  CHECK_THROWS_AS(spearman({1, 2}, {2, 1}), InputError);
  CHECK_THROWS_AS(spearman({0, 1, 2}, {1, 2, 3}), InputError);
}

TEST_CASE("the permutation p-value tracks the t-approximation") {
  const std::vector<int> a{1, 2, 3, 4, 5, 6, 7, 8};
  const std::vector<int> b{2, 1, 4, 3, 6, 5, 8, 7};
  const SpearmanResult result = spearman(a, b);
  const double permutation_p = eval::spearman_permutation_p(a, b, 20000, 9);
  CHECK_THAT(permutation_p, Catch::Matchers::WithinAbs(result.p_value, 0.02));
}

TEST_CASE("consistency analysis ranks by descending score") {
  const std::map<std::string, double> scores_a{
      {"repllama-v1-7b-lora-passage", 48.000},
      {"e5-large-v2", 45.232},
      {"multilingual-e5-large", 45.119},
      {"multilingual-e5-base", 44.130},
      {"bge-large-en-v1.5", 44.122},
      {"e5-mistral-7b-instruct", 43.787},
      {"e5-small-v2", 43.104},
      {"e5-base-v2", 43.056},
      {"bge-small-en-v1.5", 42.553},
      {"bge-base-en-v1.5", 42.388},
      {"multilingual-e5-small", 42.253},
      {"simlm-base-msmarco-finetuned", 41.675},
      {"jina-embeddings-v3", 39.787},
      {"bge-m3", 39.565},
      {"contriever-msmarco", 36.570},
      {"msmarco-roberta-base-ance-firstp", 33.637},
      {"BM25", 26.211}};
  const std::map<std::string, double> scores_b{
      {"repllama-v1-7b-lora-passage", 59.625},
      {"e5-large-v2", 55.260},
      {"multilingual-e5-large", 54.431},
      {"multilingual-e5-base", 52.581},
      {"bge-large-en-v1.5", 55.513},
      {"e5-mistral-7b-instruct", 59.015},
      {"e5-small-v2", 51.456},
      {"e5-base-v2", 51.438},
      {"bge-small-en-v1.5", 51.528},
      {"bge-base-en-v1.5", 54.292},
      {"multilingual-e5-small", 47.989},
      {"simlm-base-msmarco-finetuned", 48.102},
      {"jina-embeddings-v3", 51.098},
      {"bge-m3", 54.404},
      {"contriever-msmarco", 47.127},
      {"msmarco-roberta-base-ance-firstp", 42.107},
      {"BM25", 34.155}};

  const ConsistencyReport report = consistency_analysis(scores_a, scores_b);
  CHECK_THAT(report.rho, Catch::Matchers::WithinAbs(0.8211, 1e-4));

  // spot-check the printed rank columns
  auto rank_of = [&](const std::string& model, const std::vector<int>& ranks) {
    const auto it = std::find(report.model_ids.begin(), report.model_ids.end(),
                              model);
    REQUIRE(it != report.model_ids.end());
    return ranks[static_cast<std::size_t>(it - report.model_ids.begin())];
  };
  CHECK(rank_of("repllama-v1-7b-lora-passage", report.ranks_a) == 1);
  CHECK(rank_of("repllama-v1-7b-lora-passage", report.ranks_b) == 1);
  CHECK(rank_of("e5-mistral-7b-instruct", report.ranks_a) == 6);
  CHECK(rank_of("e5-mistral-7b-instruct", report.ranks_b) == 2);
  CHECK(rank_of("bge-m3", report.ranks_a) == 14);
  CHECK(rank_of("bge-m3", report.ranks_b) == 6);
  CHECK(rank_of("BM25", report.ranks_a) == 17);
  CHECK(rank_of("BM25", report.ranks_b) == 17);
}

TEST_CASE("consistency is rank-invariant and hits the extremes") {
  std::map<std::string, double> scores_a;
  for (int i = 0; i < 10; ++i) {
    scores_a["m" + std::to_string(i)] = 10.0 - i;
  }
  CHECK(consistency_analysis(scores_a, scores_a).rho == 1.0);

  std::map<std::string, double> negated, transformed;
  for (const auto& [model, score] : scores_a) {
    negated[model] = -score;
    transformed[model] = std::exp(score / 3.0) + 7.0;  // strictly increasing
  }
  CHECK(consistency_analysis(scores_a, negated).rho == -1.0);
  CHECK(consistency_analysis(scores_a, transformed).rho == 1.0);
}

TEST_CASE("consistency analysis validates its inputs") {
  std::map<std::string, double> two{{"a", 1.0}, {"b", 2.0}};
  CHECK_THROWS_AS(consistency_analysis(two, two), InputError);
  std::map<std::string, double> a{{"a", 1}, {"b", 2}, {"c", 3}};
  std::map<std::string, double> mismatched{{"a", 1}, {"b", 2}, {"d", 3}};
  CHECK_THROWS_AS(consistency_analysis(a, mismatched), InputError);
}

namespace {

// Three models with per-query scores; model quality decays with an
// index-dependent wobble so rankings vary by subset.
std::map<std::string, std::map<std::string, double>> synthetic_scores(
    int n_queries) {
  std::map<std::string, std::map<std::string, double>> scores;
  for (int m = 0; m < 3; ++m) {
    const std::string model = "model" + std::to_string(m);
    for (int q = 0; q < n_queries; ++q) {
      const std::string qid = "q" + std::to_string(q);
      const double wobble =
          0.3 * std::sin(0.7 * q + 2.0 * m) + 0.05 * ((q * 13 + m * 7) % 11);
      scores[model][qid] = 1.0 - 0.1 * m + wobble;
    }
  }
  return scores;
}

}  // namespace

TEST_CASE("resampling the full universe reproduces the full-data rho") {
  const auto per_query = synthetic_scores(100);
  std::map<std::string, double> full_means;
  for (const auto& [model, scores] : per_query) {
    double total = 0.0;
    for (const auto& [qid, v] : scores) total += v;
    full_means[model] = total / static_cast<double>(scores.size());
  }
  std::map<std::string, double> reference{
      {"model0", 3.0}, {"model1", 2.0}, {"model2", 1.0}};
  const double full_rho = consistency_analysis(full_means, reference).rho;

  const auto report = robustness_resample(per_query, reference, 100, 5, 77);
  REQUIRE(report.trials.size() == 5);
  for (const SpearmanResult& trial : report.trials) {
    CHECK(trial.rho == full_rho);
  }
}

TEST_CASE("resampling is deterministic under the seed") {
  const auto per_query = synthetic_scores(60);
  const std::map<std::string, double> reference{
      {"model0", 3.0}, {"model1", 2.0}, {"model2", 1.0}};
  const auto a = robustness_resample(per_query, reference, 30, 10, 5);
  const auto b = robustness_resample(per_query, reference, 30, 10, 5);
  REQUIRE(a.trials.size() == b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    CHECK(a.trials[i].rho == b.trials[i].rho);
  }
}

TEST_CASE("trial rhos equal a straight-line resample replay") {
  const auto per_query = synthetic_scores(40);
  const std::map<std::string, double> reference{
      {"model0", 3.0}, {"model1", 2.0}, {"model2", 1.0}};
  const std::uint64_t seed = 31;
  const auto report = robustness_resample(per_query, reference, 15, 5, seed);

  std::vector<std::string> universe;
  for (const auto& [qid, v] : per_query.begin()->second) {
    universe.push_back(qid);
  }
  std::sort(universe.begin(), universe.end());
  for (int trial = 0; trial < 5; ++trial) {
    RngStream rng(seed, 0x72657331, static_cast<std::uint64_t>(trial));
    const auto picked = rng.sample_without_replacement(universe.size(), 15);
    std::map<std::string, double> means;
    for (const auto& [model, scores] : per_query) {
      double total = 0.0;
      for (std::size_t index : picked) total += scores.at(universe[index]);
      means[model] = total / 15.0;
    }
    const double expected = consistency_analysis(means, reference).rho;
    CHECK(report.trials[static_cast<std::size_t>(trial)].rho == expected);
  }
}

TEST_CASE("resample rejects oversized samples and missing queries") {
  const auto per_query = synthetic_scores(10);
  const std::map<std::string, double> reference{
      {"model0", 3.0}, {"model1", 2.0}, {"model2", 1.0}};
  CHECK_THROWS_AS(robustness_resample(per_query, reference, 11, 3, 1),
                  ConfigError);
  auto broken = per_query;
  broken["model1"].erase("q3");
  CHECK_THROWS_AS(robustness_resample(broken, reference, 5, 3, 1), InputError);
}
