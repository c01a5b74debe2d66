#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "airbench/errors.hpp"
#include "airbench/eval/metrics.hpp"
#include "airbench/types.hpp"

namespace airbench::eval {

/// Reads a TREC 6-column run file (`query_id Q0 doc_id rank score tag`).
/// Entries are re-ordered by (score desc, doc id asc) per query, so line
/// order never affects evaluation.
inline std::map<std::string, RankedList> read_run_file(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open run file: " + path.string());
  std::map<std::string, RankedList> runs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string query_id, q0, doc_id, rank, score_text, tag;
    if (!(fields >> query_id >> q0 >> doc_id >> rank >> score_text >> tag)) {
      throw ParseError("run line does not have 6 columns in " + path.string(),
                       line_no);
    }
    double score = 0.0;
    try {
      score = std::stod(score_text);
    } catch (const std::exception&) {
      throw ParseError("run line has a non-numeric score in " + path.string(),
                       line_no);
    }
    RankedList& list = runs[query_id];
    list.query_id = query_id;
    list.entries.emplace_back(doc_id, score);
  }
  for (auto& [query_id, list] : runs) {
    std::sort(list.entries.begin(), list.entries.end(),
              [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;
              });
  }
  return runs;
}

inline void write_run_file(const std::map<std::string, RankedList>& runs,
                           const std::filesystem::path& path,
                           const std::string& tag = "airbench") {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write run file: " + path.string());
  out << std::setprecision(12);
  for (const auto& [query_id, list] : runs) {
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
      out << query_id << " Q0 " << list.entries[i].first << ' ' << i + 1 << ' '
          << list.entries[i].second << ' ' << tag << '\n';
    }
  }
}

/// Machine-readable metric report: one JSON record per query plus a summary
/// record.
inline void write_metric_report(const MetricReport& report,
                                const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write report: " + path.string());
  const std::string metric_name = to_string(report.metric, report.k);
  for (const auto& [query_id, value] : report.per_query) {
    nlohmann::json j;
    j["query_id"] = query_id;
    j["metric"] = metric_name;
    j["value"] = value;
    out << j.dump() << '\n';
  }
  nlohmann::json summary;
  summary["metric"] = metric_name;
  summary["mean"] = report.mean;
  summary["queries"] = report.per_query.size();
  summary["missing_queries"] = report.missing_queries.size();
  summary["skipped_queries"] = report.skipped_queries.size();
  summary["unknown_doc_entries"] = report.unknown_doc_entries;
  out << summary.dump() << '\n';
}

inline void write_per_query_csv(const MetricReport& report,
                                const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write CSV: " + path.string());
  out << "query_id,metric,value\n";
  const std::string metric_name = to_string(report.metric, report.k);
  out << std::setprecision(12);
  for (const auto& [query_id, value] : report.per_query) {
    out << query_id << ',' << metric_name << ',' << value << '\n';
  }
}

}  // namespace airbench::eval
