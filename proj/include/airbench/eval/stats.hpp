#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "airbench/errors.hpp"
#include "airbench/rng.hpp"
#include "airbench/types.hpp"

namespace airbench::eval {

struct SpearmanResult {
  double rho = 0.0;
  double p_value = 1.0;
};

/// Spearman rank correlation for tie-free rank vectors:
///   rho = 1 - 6 * sum(d^2) / (n * (n^2 - 1)),
/// with a two-tailed p-value from the t-approximation
///   t = rho * sqrt((n-2) / (1-rho^2)) with n-2 degrees of freedom.
inline SpearmanResult spearman(const std::vector<int>& ranks_a,
                               const std::vector<int>& ranks_b) {
  const std::size_t n = ranks_a.size();
  if (ranks_b.size() != n) {
    throw InputError("spearman: rank vectors have different lengths");
  }
  if (n < 3) throw InputError("spearman: need at least 3 ranks");
  auto check_permutation = [n](const std::vector<int>& ranks,
                               const char* name) {
    std::vector<bool> seen(n, false);
    for (int r : ranks) {
      if (r < 1 || static_cast<std::size_t>(r) > n ||
          seen[static_cast<std::size_t>(r) - 1]) {
        throw InputError(std::string("spearman: ") + name +
                         " is not a tie-free permutation of 1..n");
      }
      seen[static_cast<std::size_t>(r) - 1] = true;
    }
  };
  check_permutation(ranks_a, "ranks_a");
  check_permutation(ranks_b, "ranks_b");

  double d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(ranks_a[i] - ranks_b[i]);
    d2 += d * d;
  }
  const double nn = static_cast<double>(n);
  SpearmanResult result;
  result.rho = 1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0));

  if (std::abs(result.rho) >= 1.0) {
    result.p_value = std::numeric_limits<double>::min();
    return result;
  }
  const double t = result.rho * std::sqrt((nn - 2.0) /
                                          (1.0 - result.rho * result.rho));
  const boost::math::students_t dist(nn - 2.0);
  result.p_value = 2.0 * boost::math::cdf(dist, -std::abs(t));
  if (result.p_value > 1.0) result.p_value = 1.0;
  if (result.p_value <= 0.0) {
    result.p_value = std::numeric_limits<double>::min();
  }
  return result;
}

/// Permutation-test p-value (two-tailed, `shuffles` random permutations of
/// ranks_b); a cross-check for the t-approximation at small n.
inline double spearman_permutation_p(const std::vector<int>& ranks_a,
                                     const std::vector<int>& ranks_b,
                                     int shuffles = 10000,
                                     std::uint64_t seed = 0) {
  const SpearmanResult observed = spearman(ranks_a, ranks_b);
  std::vector<int> permuted = ranks_b;
  RngStream rng(seed, 0x7065726d /* "perm" */);
  int at_least_as_extreme = 0;
  for (int s = 0; s < shuffles; ++s) {
    rng.shuffle(permuted);
    const SpearmanResult shuffled = spearman(ranks_a, permuted);
    if (std::abs(shuffled.rho) >= std::abs(observed.rho) - 1e-12) {
      ++at_least_as_extreme;
    }
  }
  return (at_least_as_extreme + 1.0) / (shuffles + 1.0);
}

struct ConsistencyReport {
  std::vector<std::string> model_ids;  // sorted
  std::vector<int> ranks_a;
  std::vector<int> ranks_b;
  double rho = 0.0;
  double p_value = 1.0;
};

/// Ranks models by descending score (ties broken by model id) in both score
/// maps and correlates the two rankings.
inline ConsistencyReport consistency_analysis(
    const std::map<std::string, double>& scores_a,
    const std::map<std::string, double>& scores_b) {
  if (scores_a.size() != scores_b.size()) {
    throw InputError("consistency_analysis: model sets differ in size");
  }
  for (const auto& [model, score] : scores_a) {
    if (scores_b.find(model) == scores_b.end()) {
      throw InputError("consistency_analysis: model missing from scores_b: " +
                       model);
    }
  }
  if (scores_a.size() < 3) {
    throw InputError("consistency_analysis: need at least 3 models");
  }

  ConsistencyReport report;
  for (const auto& [model, score] : scores_a) report.model_ids.push_back(model);
  std::sort(report.model_ids.begin(), report.model_ids.end());

  auto ranks_of = [&](const std::map<std::string, double>& scores) {
    std::vector<std::string> order = report.model_ids;
    std::sort(order.begin(), order.end(),
              [&](const std::string& x, const std::string& y) {
                const double sx = scores.at(x);
                const double sy = scores.at(y);
                if (sx != sy) return sx > sy;
                return x < y;
              });
    std::map<std::string, int> rank;
    for (std::size_t i = 0; i < order.size(); ++i) {
      rank[order[i]] = static_cast<int>(i) + 1;
    }
    std::vector<int> ranks;
    ranks.reserve(report.model_ids.size());
    for (const std::string& model : report.model_ids) {
      ranks.push_back(rank[model]);
    }
    return ranks;
  };
  report.ranks_a = ranks_of(scores_a);
  report.ranks_b = ranks_of(scores_b);
  const SpearmanResult result = spearman(report.ranks_a, report.ranks_b);
  report.rho = result.rho;
  report.p_value = result.p_value;
  return report;
}

struct ResampleReport {
  std::vector<SpearmanResult> trials;
  double mean_rho = 0.0;
  double mean_p = 0.0;
};

/// Robustness experiment: `trials` times, draw a uniform subset of
/// `sample_size` queries, recompute each model's mean per-query score on
/// the subset, rank, and correlate against the fixed reference ranking.
inline ResampleReport robustness_resample(
    const std::map<std::string, std::map<std::string, double>>&
        per_query_scores,
    const std::map<std::string, double>& reference_scores,
    std::size_t sample_size, int trials, std::uint64_t rng_seed) {
  if (per_query_scores.empty()) {
    throw InputError("robustness_resample: no models");
  }
  // Every model must cover the same query universe.
  std::vector<std::string> universe;
  for (const auto& [query_id, score] : per_query_scores.begin()->second) {
    universe.push_back(query_id);
  }
  std::sort(universe.begin(), universe.end());
  for (const auto& [model, scores] : per_query_scores) {
    if (scores.size() != universe.size()) {
      throw InputError("robustness_resample: query universe mismatch for " +
                       model);
    }
    for (const std::string& query_id : universe) {
      if (scores.find(query_id) == scores.end()) {
        throw InputError("robustness_resample: model " + model +
                         " lacks query " + query_id);
      }
    }
  }
  if (sample_size == 0 || sample_size > universe.size()) {
    throw ConfigError(
        "robustness_resample: sample_size must be in [1, universe size]");
  }
  if (trials < 1) throw ConfigError("robustness_resample: trials must be >= 1");

  ResampleReport report;
  for (int trial = 0; trial < trials; ++trial) {
    RngStream rng(rng_seed, 0x72657331 /* "res1" */,
                  static_cast<std::uint64_t>(trial));
    const std::vector<std::size_t> picked =
        rng.sample_without_replacement(universe.size(), sample_size);
    std::map<std::string, double> trial_scores;
    for (const auto& [model, scores] : per_query_scores) {
      double total = 0.0;
      for (std::size_t index : picked) total += scores.at(universe[index]);
      trial_scores[model] = total / static_cast<double>(sample_size);
    }
    const ConsistencyReport consistency =
        consistency_analysis(trial_scores, reference_scores);
    report.trials.push_back(SpearmanResult{consistency.rho,
                                           consistency.p_value});
  }
  for (const SpearmanResult& trial : report.trials) {
    report.mean_rho += trial.rho;
    report.mean_p += trial.p_value;
  }
  report.mean_rho /= static_cast<double>(report.trials.size());
  report.mean_p /= static_cast<double>(report.trials.size());
  return report;
}

}  // namespace airbench::eval
