#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "airbench/errors.hpp"

namespace airbench::qc {

/// One line of the QC audit log. Every judged (query, document) pair gets a
/// record; per-query terminal records ("done" / "dropped" / query-filter
/// outcomes) make the log replayable as a checkpoint.
struct QcRecord {
  std::string query_id;
  std::string action;  // keep_query, discard_query, skip, remove_false_negative,
                       // add_new_positive, integrity_flag, done, dropped
  std::string doc_id;
  std::string doc_class;  // type1, type2, type3 (empty for query-level records)
  int llm_level = -1;     // -1 when no judgment was obtained
  // (reranker_id, rank, vote) triples
  std::vector<std::tuple<std::string, int, bool>> votes;
  std::string reason;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["query_id"] = query_id;
    j["action"] = action;
    j["doc_id"] = doc_id;
    j["doc_class"] = doc_class;
    j["llm_level"] = llm_level;
    nlohmann::json votes_json = nlohmann::json::array();
    for (const auto& [id, rank, vote] : votes) {
      votes_json.push_back({{"reranker_id", id}, {"rank", rank}, {"vote", vote}});
    }
    j["votes"] = votes_json;
    if (!reason.empty()) j["reason"] = reason;
    return j;
  }

  static QcRecord from_json(const nlohmann::json& j) {
    QcRecord record;
    record.query_id = j.at("query_id").get<std::string>();
    record.action = j.at("action").get<std::string>();
    record.doc_id = j.value("doc_id", std::string{});
    record.doc_class = j.value("doc_class", std::string{});
    record.llm_level = j.value("llm_level", -1);
    if (j.contains("votes")) {
      for (const auto& v : j.at("votes")) {
        record.votes.emplace_back(v.at("reranker_id").get<std::string>(),
                                  v.at("rank").get<int>(),
                                  v.at("vote").get<bool>());
      }
    }
    record.reason = j.value("reason", std::string{});
    return record;
  }
};

/// Append-only QC audit log, optionally mirrored to a file as it grows so a
/// restarted run can resume from the last completed query.
class QcReport {
 public:
  QcReport() = default;

  /// Opens `path` for appending; existing records are loaded first.
  explicit QcReport(const std::filesystem::path& path) : path_(path) {
    if (std::filesystem::exists(path)) {
      std::ifstream in(path, std::ios::binary);
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
          throw ParseError("malformed QC report record in " + path.string(),
                           line_no);
        }
        records_.push_back(QcRecord::from_json(j));
      }
    }
    out_.open(path, std::ios::binary | std::ios::app);
    if (!out_) throw InputError("cannot open QC report: " + path.string());
  }

  void add(QcRecord record) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (out_.is_open()) {
      out_ << record.to_json().dump() << '\n';
      out_.flush();
    }
    records_.push_back(std::move(record));
  }

  const std::vector<QcRecord>& records() const { return records_; }

  void save(const std::filesystem::path& path) const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write QC report: " + path.string());
    for (const QcRecord& record : records_) {
      out << record.to_json().dump() << '\n';
    }
  }

 private:
  mutable std::mutex mutex_;
  std::filesystem::path path_;
  std::ofstream out_;
  std::vector<QcRecord> records_;
};

}  // namespace airbench::qc
