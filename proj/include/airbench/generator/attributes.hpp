#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>

#include "airbench/errors.hpp"
#include "airbench/rng.hpp"
#include "airbench/types.hpp"

namespace airbench::gen {

/// Knobs for the candidate-generation loop. Ratio defaults follow the
/// benchmark recipe: lengths 1:4:2:1, QA types 3:1:1, info 1:1, styles
/// 5:3:3:1:1:1:1, and 3-7 hard negatives per QA query (none for Long-Doc).
struct GenerationConfig {
  Task task = Task::QA;
  int n_queries = 1;
  std::array<double, kLengthBucketCount> length_ratio{1, 4, 2, 1};
  // Question : Problem : Claim. Long-Doc drops Problem and renormalizes.
  std::array<double, kQueryTypeCount> type_ratio{3, 1, 1};
  std::array<double, kInfoTypeCount> info_ratio{1, 1};
  std::array<double, kStyleCount> style_ratio{5, 3, 3, 1, 1, 1, 1};
  std::pair<int, int> hard_negative_range{3, 7};
  int rewrite_max_iters = 3;
  double rewrite_overlap_threshold = 0.6;
  std::uint64_t rng_seed = 0;

  /// Type weights actually sampled from, after the task adjustment.
  std::array<double, kQueryTypeCount> effective_type_ratio() const {
    std::array<double, kQueryTypeCount> weights = type_ratio;
    if (task == Task::LongDoc) {
      weights[static_cast<std::size_t>(QueryType::Problem)] = 0.0;
    }
    return weights;
  }

  /// Hard-negative draw interval; empty ([0,0]) for Long-Doc.
  std::pair<int, int> effective_hard_negative_range() const {
    if (task == Task::LongDoc) return {0, 0};
    return hard_negative_range;
  }

  void validate() const {
    auto check_weights = [](std::span<const double> weights,
                            const char* name) {
      double total = 0.0;
      for (double w : weights) {
        if (w < 0.0) {
          throw ConfigError(std::string(name) + " weights must be nonnegative");
        }
        total += w;
      }
      if (!(total > 0.0)) {
        throw ConfigError(std::string(name) + " weights must have positive sum");
      }
    };
    if (n_queries < 1) throw ConfigError("n_queries must be >= 1");
    check_weights(length_ratio, "length");
    check_weights(effective_type_ratio(), "type");
    check_weights(info_ratio, "info");
    check_weights(style_ratio, "style");
    // A Claim draw restricts lengths to the two long buckets; those weights
    // must be samplable whenever Claim itself is.
    if (effective_type_ratio()[static_cast<std::size_t>(QueryType::Claim)] >
            0.0 &&
        length_ratio[2] + length_ratio[3] <= 0.0) {
      throw ConfigError(
          "claim queries need positive weight on the 10_to_20 or over_20 "
          "length buckets");
    }
    if (hard_negative_range.first < 0 ||
        hard_negative_range.first > hard_negative_range.second) {
      throw ConfigError("hard_negative_range must satisfy 0 <= lo <= hi");
    }
    if (rewrite_max_iters < 1) throw ConfigError("rewrite_max_iters must be >= 1");
    if (rewrite_overlap_threshold < 0.0 || rewrite_overlap_threshold > 1.0) {
      throw ConfigError("rewrite_overlap_threshold must be in [0,1]");
    }
  }
};

/// Draws one attribute tuple. Each field comes from its own categorical
/// draw; a Claim type redraws the length from the two long buckets with
/// renormalized weights, so Claim never pairs with a short length.
inline QueryAttributes sample_attributes(const GenerationConfig& config,
                                         RngStream& rng) {
  QueryAttributes attrs;
  attrs.length_bucket =
      static_cast<LengthBucket>(rng.categorical(config.length_ratio));
  attrs.query_type =
      static_cast<QueryType>(rng.categorical(config.effective_type_ratio()));
  if (attrs.query_type == QueryType::Claim) {
    const std::array<double, 2> long_weights{config.length_ratio[2],
                                             config.length_ratio[3]};
    attrs.length_bucket =
        static_cast<LengthBucket>(2 + rng.categorical(long_weights));
  }
  attrs.info_type = static_cast<InfoType>(rng.categorical(config.info_ratio));
  attrs.style = static_cast<Style>(rng.categorical(config.style_ratio));
  return attrs;
}

}  // namespace airbench::gen
