#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "airbench/errors.hpp"
#include "airbench/rng.hpp"
#include "airbench/types.hpp"

namespace airbench::qc {

/// Assigns queries to dev/test. QA: uniformly random with
/// |dev| = round(|Q| * dev_fraction), deterministic under the seed and
/// independent of input order. Long-Doc datasets are assigned wholesale
/// (the split is decided per dataset, not per query), so every query gets
/// `longdoc_assignment`.
inline SplitAssignment split_queries(const std::vector<Query>& queries,
                                     Task task, double dev_fraction,
                                     std::uint64_t rng_seed,
                                     SplitKind longdoc_assignment
                                     = SplitKind::Test) {
  if (queries.empty()) throw InputError("split_queries: no queries");
  if (dev_fraction < 0.0 || dev_fraction > 1.0) {
    throw ConfigError("dev_fraction must be in [0,1]");
  }
  SplitAssignment split;
  if (task == Task::LongDoc) {
    for (const Query& query : queries) split[query.id] = longdoc_assignment;
    return split;
  }

  std::vector<std::string> ids;
  ids.reserve(queries.size());
  for (const Query& query : queries) ids.push_back(query.id);
  std::sort(ids.begin(), ids.end());

  const auto dev_count = static_cast<std::size_t>(
      std::llround(static_cast<double>(ids.size()) * dev_fraction));
  RngStream rng(rng_seed, 0x73706c69 /* "spli" */);
  const std::vector<std::size_t> dev_indices =
      rng.sample_without_replacement(ids.size(), dev_count);

  for (const std::string& id : ids) split[id] = SplitKind::Test;
  for (std::size_t index : dev_indices) split[ids[index]] = SplitKind::Dev;
  return split;
}

}  // namespace airbench::qc
