#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "airbench/errors.hpp"
#include "airbench/types.hpp"

namespace airbench::corpus {

using json = nlohmann::json;

// --- JSON conversions -----------------------------------------------------

inline json document_to_json(const Document& doc) {
  json j;
  j["_id"] = doc.id;
  j["title"] = doc.title;
  j["text"] = doc.text;
  if (doc.origin != DocOrigin::SeedCorpus) j["origin"] = to_string(doc.origin);
  if (!doc.source_meta.empty()) {
    json meta = json::object();
    for (const auto& [key, value] : doc.source_meta) meta[key] = value;
    j["source_meta"] = meta;
  }
  return j;
}

inline Document document_from_json(const json& j) {
  Document doc;
  doc.id = j.at("_id").get<std::string>();
  doc.title = j.value("title", std::string{});
  doc.text = j.at("text").get<std::string>();
  if (j.contains("origin")) {
    doc.origin = doc_origin_from_string(j.at("origin").get<std::string>());
  }
  if (j.contains("source_meta")) {
    for (const auto& [key, value] : j.at("source_meta").items()) {
      doc.source_meta[key] = value.get<std::string>();
    }
  }
  return doc;
}

inline json query_to_json(const Query& query) {
  json j;
  j["_id"] = query.id;
  j["text"] = query.text;
  const bool has_provenance =
      !query.original_text.empty() || !query.character.empty() ||
      !query.scenario.empty() || !query.positive_doc_id.empty() ||
      !query.rewrite_history.empty();
  if (has_provenance) {
    json meta;
    meta["original_text"] = query.original_text;
    meta["character"] = query.character;
    meta["scenario"] = query.scenario;
    meta["positive_doc_id"] = query.positive_doc_id;
    meta["rewrite_history"] = query.rewrite_history;
    json attrs;
    attrs["length_bucket"] = to_string(query.attributes.length_bucket);
    attrs["query_type"] = to_string(query.attributes.query_type);
    attrs["info_type"] = to_string(query.attributes.info_type);
    attrs["style"] = to_string(query.attributes.style);
    meta["attributes"] = attrs;
    j["metadata"] = meta;
  }
  return j;
}

inline Query query_from_json(const json& j) {
  Query query;
  query.id = j.at("_id").get<std::string>();
  query.text = j.at("text").get<std::string>();
  if (j.contains("metadata")) {
    const json& meta = j.at("metadata");
    query.original_text = meta.value("original_text", std::string{});
    query.character = meta.value("character", std::string{});
    query.scenario = meta.value("scenario", std::string{});
    query.positive_doc_id = meta.value("positive_doc_id", std::string{});
    if (meta.contains("rewrite_history")) {
      query.rewrite_history =
          meta.at("rewrite_history").get<std::vector<std::string>>();
    }
    if (meta.contains("attributes")) {
      const json& attrs = meta.at("attributes");
      query.attributes.length_bucket =
          length_bucket_from_string(attrs.at("length_bucket").get<std::string>());
      query.attributes.query_type =
          query_type_from_string(attrs.at("query_type").get<std::string>());
      query.attributes.info_type =
          info_type_from_string(attrs.at("info_type").get<std::string>());
      query.attributes.style =
          style_from_string(attrs.at("style").get<std::string>());
    }
  }
  return query;
}

// --- line-delimited readers/writers ----------------------------------------

namespace detail {

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open for reading: " + path.string());
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot open for writing: " + path.string());
  return out;
}

template <typename Record, typename FromJson>
void for_each_jsonl(const std::filesystem::path& path, FromJson from_json,
                    const std::function<void(Record&&)>& fn) {
  std::ifstream in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw ParseError("malformed record in " + path.string(), line_no);
    }
    try {
      fn(from_json(j));
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad record in ") + path.string() + ": " +
                           e.what(),
                       line_no);
    }
  }
}

}  // namespace detail

inline void for_each_document(const std::filesystem::path& path,
                              const std::function<void(Document&&)>& fn) {
  detail::for_each_jsonl<Document>(path, document_from_json, fn);
}

inline std::vector<Document> read_corpus(const std::filesystem::path& path) {
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  for_each_document(path, [&](Document&& doc) {
    if (!seen.insert(doc.id).second) {
      throw IntegrityError("duplicate document id in " + path.string() + ": " +
                           doc.id);
    }
    docs.push_back(std::move(doc));
  });
  return docs;
}

inline void write_corpus(const std::vector<Document>& docs,
                         const std::filesystem::path& path) {
  std::ofstream out = detail::open_output(path);
  for (const Document& doc : docs) out << document_to_json(doc).dump() << '\n';
}

inline std::vector<Query> read_queries(const std::filesystem::path& path) {
  std::vector<Query> queries;
  std::unordered_set<std::string> seen;
  detail::for_each_jsonl<Query>(path, query_from_json, [&](Query&& query) {
    if (!seen.insert(query.id).second) {
      throw IntegrityError("duplicate query id in " + path.string() + ": " +
                           query.id);
    }
    queries.push_back(std::move(query));
  });
  return queries;
}

inline void write_queries(const std::vector<Query>& queries,
                          const std::filesystem::path& path) {
  std::ofstream out = detail::open_output(path);
  for (const Query& query : queries) out << query_to_json(query).dump() << '\n';
}

inline std::vector<Qrel> read_qrels(const std::filesystem::path& path) {
  std::ifstream in = detail::open_input(path);
  std::vector<Qrel> qrels;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("query-id", 0) == 0) continue;  // header
    const std::size_t tab1 = line.find('\t');
    const std::size_t tab2 =
        tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
    if (tab1 == std::string::npos || tab2 == std::string::npos) {
      throw ParseError("qrels line is not tab-separated in " + path.string(),
                       line_no);
    }
    Qrel qrel;
    qrel.query_id = line.substr(0, tab1);
    qrel.doc_id = line.substr(tab1 + 1, tab2 - tab1 - 1);
    const std::string score = line.substr(tab2 + 1);
    if (score == "0") {
      qrel.relevance = 0;
    } else if (score == "1") {
      qrel.relevance = 1;
    } else {
      throw ParseError("qrels score must be 0 or 1 in " + path.string(),
                       line_no);
    }
    if (!seen.emplace(qrel.query_id, qrel.doc_id).second) {
      throw IntegrityError("duplicate qrel (" + qrel.query_id + ", " +
                           qrel.doc_id + ") in " + path.string());
    }
    qrels.push_back(std::move(qrel));
  }
  return qrels;
}

inline void write_qrels(const std::vector<Qrel>& qrels,
                        const std::filesystem::path& path) {
  std::ofstream out = detail::open_output(path);
  out << "query-id\tcorpus-id\tscore\n";
  for (const Qrel& qrel : qrels) {
    out << qrel.query_id << '\t' << qrel.doc_id << '\t' << qrel.relevance
        << '\n';
  }
}

inline SplitAssignment read_split(const std::filesystem::path& path) {
  std::ifstream in = detail::open_input(path);
  SplitAssignment split;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("query-id", 0) == 0) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("split line is not tab-separated in " + path.string(),
                       line_no);
    }
    const std::string query_id = line.substr(0, tab);
    if (split.count(query_id) != 0) {
      throw IntegrityError("duplicate split entry for " + query_id + " in " +
                           path.string());
    }
    split[query_id] = split_from_string(line.substr(tab + 1));
  }
  return split;
}

inline void write_split(const SplitAssignment& split,
                        const std::filesystem::path& path) {
  std::ofstream out = detail::open_output(path);
  out << "query-id\tsplit\n";
  for (const auto& [query_id, kind] : split) {
    out << query_id << '\t' << to_string(kind) << '\n';
  }
}

// --- candidate-set and bundle directories ----------------------------------

inline void write_candidates(const CandidateSets& sets,
                             const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_queries(sets.queries, dir / "queries.jsonl");
  write_corpus(sets.positives, dir / "positives.jsonl");
  write_corpus(sets.hard_negatives, dir / "hard_negatives.jsonl");
  std::vector<Qrel> qrels = sets.pos_qrels;
  qrels.insert(qrels.end(), sets.neg_qrels.begin(), sets.neg_qrels.end());
  write_qrels(qrels, dir / "qrels.tsv");
}

inline CandidateSets read_candidates(const std::filesystem::path& dir) {
  CandidateSets sets;
  sets.queries = read_queries(dir / "queries.jsonl");
  sets.positives = read_corpus(dir / "positives.jsonl");
  sets.hard_negatives = read_corpus(dir / "hard_negatives.jsonl");
  for (Qrel& qrel : read_qrels(dir / "qrels.tsv")) {
    (qrel.relevance == 1 ? sets.pos_qrels : sets.neg_qrels)
        .push_back(std::move(qrel));
  }
  return sets;
}

inline void write_bundle(const DatasetBundle& bundle,
                         const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_corpus(bundle.corpus, dir / "corpus.jsonl");
  write_queries(bundle.queries, dir / "queries.jsonl");
  write_qrels(bundle.qrels, dir / "qrels.tsv");
  write_split(bundle.split, dir / "split.tsv");
}

inline DatasetBundle read_bundle(const std::filesystem::path& dir) {
  DatasetBundle bundle;
  bundle.corpus = read_corpus(dir / "corpus.jsonl");
  bundle.queries = read_queries(dir / "queries.jsonl");
  bundle.qrels = read_qrels(dir / "qrels.tsv");
  bundle.split = read_split(dir / "split.tsv");
  return bundle;
}

}  // namespace airbench::corpus
