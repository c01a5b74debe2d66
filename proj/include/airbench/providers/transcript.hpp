#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "airbench/errors.hpp"
#include "airbench/providers/provider.hpp"

namespace airbench::providers {

/// FNV-1a 64-bit; stable across platforms, unlike std::hash.
inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

/// Fingerprint of one provider request: role tag plus the canonical (key-
/// sorted) JSON dump of the request body, hashed and hex-encoded.
inline std::string request_fingerprint(std::string_view role,
                                       const nlohmann::json& body) {
  const std::string canon = std::string(role) + "\n" + body.dump();
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(canon)));
  return std::string(buf);
}

/// Ordered (fingerprint, response) log of provider traffic. Replay is keyed
/// by fingerprint: identical requests always get the identical response
/// (the first recorded one).
class Transcript {
 public:
  struct Entry {
    std::string fingerprint;
    std::string response;
  };

  Transcript() : mutex_(std::make_unique<std::mutex>()) {}

  void add(std::string fingerprint, std::string response) {
    std::lock_guard<std::mutex> lock(*mutex_);
    if (index_.find(fingerprint) == index_.end()) {
      index_.emplace(fingerprint, entries_.size());
    }
    entries_.push_back(Entry{std::move(fingerprint), std::move(response)});
  }

  std::optional<std::string> find(const std::string& fingerprint) const {
    std::lock_guard<std::mutex> lock(*mutex_);
    auto it = index_.find(fingerprint);
    if (it == index_.end()) return std::nullopt;
    return entries_[it->second].response;
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(*mutex_);
    return entries_.size();
  }

  void save(const std::filesystem::path& path) const {
    std::lock_guard<std::mutex> lock(*mutex_);
    if (path.has_parent_path()) {
      std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write transcript: " + path.string());
    for (const Entry& entry : entries_) {
      nlohmann::json j;
      j["fingerprint"] = entry.fingerprint;
      j["response"] = entry.response;
      out << j.dump() << '\n';
    }
  }

  static Transcript load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read transcript: " + path.string());
    Transcript transcript;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.contains("fingerprint") ||
          !j.contains("response")) {
        throw ParseError("malformed transcript record in " + path.string(),
                         line_no);
      }
      transcript.add(j["fingerprint"].get<std::string>(),
                     j["response"].get<std::string>());
    }
    return transcript;
  }

 private:
  mutable std::unique_ptr<std::mutex> mutex_;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

// --- record / replay --------------------------------------------------------
//
// The recording wrappers key each request by a fingerprint of its normalized
// body and store the inner provider's normalized response, so a recorded
// transcript replays any pipeline run deterministically without live models.

namespace detail {

inline nlohmann::json chat_fingerprint_body(const std::string& prompt,
                                            const ChatParams& params) {
  nlohmann::json body;
  body["prompt"] = prompt;
  body["temperature"] = params.temperature;
  body["max_tokens"] = params.max_tokens;
  return body;
}

inline nlohmann::json embed_fingerprint_body(
    const std::vector<std::string>& texts) {
  nlohmann::json body;
  body["input"] = texts;
  return body;
}

inline nlohmann::json rerank_fingerprint_body(
    const std::string& query, const std::vector<std::string>& docs) {
  nlohmann::json body;
  body["query"] = query;
  body["documents"] = docs;
  return body;
}

}  // namespace detail

class RecordingChatProvider : public ChatProvider {
 public:
  RecordingChatProvider(ChatProvider& inner, Transcript& transcript)
      : inner_(inner), transcript_(transcript) {}

  std::string complete(const std::string& prompt,
                       const ChatParams& params) override {
    std::string reply = inner_.complete(prompt, params);
    transcript_.add(
        request_fingerprint("chat", detail::chat_fingerprint_body(prompt, params)),
        reply);
    return reply;
  }

 private:
  ChatProvider& inner_;
  Transcript& transcript_;
};

class ReplayChatProvider : public ChatProvider {
 public:
  explicit ReplayChatProvider(const Transcript& transcript)
      : transcript_(transcript) {}

  std::string complete(const std::string& prompt,
                       const ChatParams& params) override {
    const std::string fp =
        request_fingerprint("chat", detail::chat_fingerprint_body(prompt, params));
    if (auto reply = transcript_.find(fp)) return *reply;
    throw ProviderError("chat transcript miss for fingerprint " + fp);
  }

 private:
  const Transcript& transcript_;
};

class RecordingEmbeddingProvider : public EmbeddingProvider {
 public:
  RecordingEmbeddingProvider(EmbeddingProvider& inner, Transcript& transcript)
      : inner_(inner), transcript_(transcript) {}

  std::vector<std::vector<double>> embed(
      const std::vector<std::string>& texts) override {
    auto vectors = inner_.embed(texts);
    transcript_.add(
        request_fingerprint("embed", detail::embed_fingerprint_body(texts)),
        nlohmann::json(vectors).dump());
    return vectors;
  }

 private:
  EmbeddingProvider& inner_;
  Transcript& transcript_;
};

class ReplayEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit ReplayEmbeddingProvider(const Transcript& transcript)
      : transcript_(transcript) {}

  std::vector<std::vector<double>> embed(
      const std::vector<std::string>& texts) override {
    const std::string fp =
        request_fingerprint("embed", detail::embed_fingerprint_body(texts));
    if (auto reply = transcript_.find(fp)) {
      return nlohmann::json::parse(*reply)
          .get<std::vector<std::vector<double>>>();
    }
    throw ProviderError("embedding transcript miss for fingerprint " + fp);
  }

 private:
  const Transcript& transcript_;
};

class RecordingRerankProvider : public RerankProvider {
 public:
  RecordingRerankProvider(RerankProvider& inner, Transcript& transcript)
      : inner_(inner), transcript_(transcript) {}

  std::vector<double> score(const std::string& query,
                            const std::vector<std::string>& docs) override {
    auto scores = inner_.score(query, docs);
    transcript_.add(request_fingerprint(
                        "rerank:" + inner_.id(),
                        detail::rerank_fingerprint_body(query, docs)),
                    nlohmann::json(scores).dump());
    return scores;
  }

  std::string id() const override { return inner_.id(); }

 private:
  RerankProvider& inner_;
  Transcript& transcript_;
};

class ReplayRerankProvider : public RerankProvider {
 public:
  ReplayRerankProvider(const Transcript& transcript, std::string id)
      : transcript_(transcript), id_(std::move(id)) {}

  std::vector<double> score(const std::string& query,
                            const std::vector<std::string>& docs) override {
    const std::string fp = request_fingerprint(
        "rerank:" + id_, detail::rerank_fingerprint_body(query, docs));
    if (auto reply = transcript_.find(fp)) {
      return nlohmann::json::parse(*reply).get<std::vector<double>>();
    }
    throw ProviderError("rerank transcript miss for fingerprint " + fp);
  }

  std::string id() const override { return id_; }

 private:
  const Transcript& transcript_;
  std::string id_;
};

}  // namespace airbench::providers
