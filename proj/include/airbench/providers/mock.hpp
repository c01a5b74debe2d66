#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "airbench/providers/provider.hpp"
#include "airbench/providers/transcript.hpp"
#include "airbench/tokenizer.hpp"

namespace airbench::providers {

/// Returns every prompt unchanged.
class EchoChatProvider : public ChatProvider {
 public:
  std::string complete(const std::string& prompt, const ChatParams&) override {
    return prompt;
  }
};

/// Replays a FIFO queue of canned replies; throws when the queue runs dry.
class ScriptedChatProvider : public ChatProvider {
 public:
  void enqueue(std::string reply) {
    std::lock_guard<std::mutex> lock(mutex_);
    replies_.push_back(std::move(reply));
  }

  std::string complete(const std::string& prompt, const ChatParams&) override {
    std::lock_guard<std::mutex> lock(mutex_);
    prompts_.push_back(prompt);
    if (replies_.empty()) {
      throw ProviderError("scripted chat provider: reply queue underflow");
    }
    std::string reply = std::move(replies_.front());
    replies_.pop_front();
    return reply;
  }

  const std::vector<std::string>& prompts() const { return prompts_; }

 private:
  std::mutex mutex_;
  std::deque<std::string> replies_;
  std::vector<std::string> prompts_;
};

/// Deterministic embedder: each token hashes to one coordinate of a
/// fixed-dimension count vector, L2-normalized. Identical texts always get
/// identical vectors; distinct single tokens get (near) one-hot vectors.
class HashingEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit HashingEmbeddingProvider(std::size_t dim = 256) : dim_(dim) {}

  std::vector<std::vector<double>> embed(
      const std::vector<std::string>& texts) override {
    std::vector<std::vector<double>> vectors;
    vectors.reserve(texts.size());
    for (const std::string& text : texts) {
      std::vector<double> v(dim_, 0.0);
      for (const std::string& token : tokenizer_.tokenize(text)) {
        v[fnv1a(token) % dim_] += 1.0;
      }
      double norm = 0.0;
      for (double x : v) norm += x * x;
      if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
      }
      vectors.push_back(std::move(v));
    }
    return vectors;
  }

 private:
  std::size_t dim_;
  Tokenizer tokenizer_;
};

/// Scores a document by token-set Jaccard overlap with the query, so an
/// exact copy of the query scores highest.
class TokenOverlapReranker : public RerankProvider {
 public:
  explicit TokenOverlapReranker(std::string id = "token-overlap")
      : id_(std::move(id)) {}

  std::vector<double> score(const std::string& query,
                            const std::vector<std::string>& docs) override {
    const auto q = token_set(query);
    std::vector<double> scores;
    scores.reserve(docs.size());
    for (const std::string& doc : docs) {
      const auto d = token_set(doc);
      std::size_t common = 0;
      for (const std::string& t : q) common += d.count(t);
      const std::size_t unioned = q.size() + d.size() - common;
      scores.push_back(unioned == 0 ? 0.0
                                    : static_cast<double>(common) /
                                          static_cast<double>(unioned));
    }
    return scores;
  }

  std::string id() const override { return id_; }

 private:
  std::set<std::string> token_set(const std::string& text) const {
    auto tokens = tokenizer_.tokenize(text);
    return {tokens.begin(), tokens.end()};
  }

  std::string id_;
  Tokenizer tokenizer_;
};

/// Gives every document the same score.
class ConstantReranker : public RerankProvider {
 public:
  explicit ConstantReranker(double value = 0.0, std::string id = "constant")
      : value_(value), id_(std::move(id)) {}

  std::vector<double> score(const std::string&,
                            const std::vector<std::string>& docs) override {
    return std::vector<double>(docs.size(), value_);
  }

  std::string id() const override { return id_; }

 private:
  double value_;
  std::string id_;
};

/// Pops one pre-scripted score vector per call.
class ScriptedReranker : public RerankProvider {
 public:
  explicit ScriptedReranker(std::string id = "scripted") : id_(std::move(id)) {}

  void enqueue(std::vector<double> scores) {
    std::lock_guard<std::mutex> lock(mutex_);
    scripted_.push_back(std::move(scores));
  }

  std::vector<double> score(const std::string&,
                            const std::vector<std::string>& docs) override {
    std::lock_guard<std::mutex> lock(mutex_);
    if (scripted_.empty()) {
      throw ProviderError("scripted reranker: score queue underflow");
    }
    std::vector<double> scores = std::move(scripted_.front());
    scripted_.pop_front();
    if (scores.size() != docs.size()) {
      throw ProviderError("scripted reranker: score count mismatch");
    }
    return scores;
  }

  std::string id() const override { return id_; }

 private:
  std::mutex mutex_;
  std::deque<std::vector<double>> scripted_;
  std::string id_;
};

/// Offline stand-in for the chat model across the whole pipeline. Replies
/// are pure functions of the prompt, so runs are reproducible for any
/// worker count. The mock recognizes the builtin prompt templates by their
/// instruction phrases; judging grades by the fraction of query tokens the
/// document contains.
class PipelineChatMock : public ChatProvider {
 public:
  std::string complete(const std::string& prompt, const ChatParams&) override {
    if (prompt.find("judge whether the document is relevant") !=
        std::string::npos) {
      return judge_reply(prompt);
    }
    if (prompt.find("list 3 distinct characters") != std::string::npos) {
      return characters_reply(prompt);
    }
    if (prompt.find("describe one scenario") != std::string::npos) {
      return scenario_reply(prompt);
    }
    if (prompt.find("generate one search query") != std::string::npos) {
      return query_reply(prompt);
    }
    if (prompt.find("Rewrite the search query") != std::string::npos) {
      return rewrite_reply(prompt);
    }
    if (prompt.find("hard negative documents") != std::string::npos) {
      return hard_negative_reply(prompt);
    }
    if (prompt.find("Select the most suitable type") != std::string::npos) {
      return pick_label(prompt, {"how", "what", "when", "where", "which",
                                 "who", "why", "yes/no", "claim", "others"});
    }
    if (prompt.find("Select the most suitable style") != std::string::npos) {
      return pick_label(prompt,
                        {"formal", "informal", "professional", "casual",
                         "complicated", "concise", "academic", "others"});
    }
    return prompt;
  }

 private:
  static std::string between(const std::string& text, const std::string& from,
                             const std::string& to) {
    const std::size_t begin = text.find(from);
    if (begin == std::string::npos) return {};
    const std::size_t start = begin + from.size();
    const std::size_t end = text.find(to, start);
    if (end == std::string::npos) return text.substr(start);
    return text.substr(start, end - start);
  }

  static std::string hex8(const std::string& text) {
    char buf[9];
    std::snprintf(buf, sizeof(buf), "%08x",
                  static_cast<unsigned>(fnv1a(text) & 0xffffffffu));
    return std::string(buf);
  }

  std::vector<std::string> content_tokens(const std::string& text,
                                          std::size_t max_count) const {
    std::vector<std::string> tokens;
    for (const std::string& token : tokenizer_.tokenize(text)) {
      if (token.size() < 3) continue;
      if (std::find(tokens.begin(), tokens.end(), token) != tokens.end()) {
        continue;
      }
      tokens.push_back(token);
      if (tokens.size() >= max_count) break;
    }
    return tokens;
  }

  static std::string fenced(const std::vector<std::string>& lines) {
    std::string out = "```\n";
    for (const std::string& line : lines) out += line + "\n";
    out += "```";
    return out;
  }

  std::string characters_reply(const std::string& prompt) const {
    const std::string doc = between(prompt, "Document:\n", "\n\nAnswer");
    const std::string h = hex8(doc);
    return fenced({"researcher " + h, "student " + h, "practitioner " + h});
  }

  std::string scenario_reply(const std::string& prompt) const {
    const std::string doc = between(prompt, "Document:\n", "\n\nCharacter:");
    const std::string character =
        between(prompt, "Character: ", "\n\nAnswer");
    auto tokens = content_tokens(doc, 2);
    std::string topic;
    for (const std::string& t : tokens) topic += " " + t;
    return fenced({"a " + character + " looking into" + topic});
  }

  std::string query_reply(const std::string& prompt) const {
    const std::string doc = between(prompt, "Document:\n", "\n\nCharacter:");
    std::size_t want = 7;
    if (prompt.find("less than 5 words") != std::string::npos) {
      want = 4;
    } else if (prompt.find("less than 10 words") != std::string::npos) {
      want = 7;
    } else if (prompt.find("10 to 20 words") != std::string::npos) {
      want = 12;
    } else if (prompt.find("at least 20 words") != std::string::npos) {
      want = 20;
    }
    auto tokens = content_tokens(doc, want);
    std::string body;
    for (const std::string& t : tokens) {
      if (!body.empty()) body += " ";
      body += t;
    }
    if (prompt.find("a claim") != std::string::npos) {
      return fenced({body + " matters"});
    }
    if (prompt.find("a problem") != std::string::npos) {
      return fenced({"struggling with " + body});
    }
    return fenced({"what about " + body});
  }

  std::string rewrite_reply(const std::string& prompt) const {
    const std::string query = between(prompt, "Query: ", "\n\nDocument:");
    return fenced({"put differently " + query});
  }

  std::string hard_negative_reply(const std::string& prompt) const {
    const std::string query = between(prompt, "Query: ", "\n\nRelevant");
    const std::string doc =
        between(prompt, "Relevant document:\n", "\n\nAnswer");
    int count = 3;
    const std::string marker = "generate ";
    const std::size_t at = prompt.find(marker);
    if (at != std::string::npos) {
      count = std::atoi(prompt.c_str() + at + marker.size());
      if (count <= 0) count = 3;
    }
    // Keep roughly half the query tokens so negatives look related without
    // grading as relevant.
    auto tokens = tokenizer_.tokenize(query);
    std::string half;
    for (std::size_t i = 0; i < tokens.size(); i += 2) {
      if (!half.empty()) half += " ";
      half += tokens[i];
    }
    std::vector<std::string> lines;
    for (int j = 0; j < count; ++j) {
      lines.push_back("on another note " + half + " alongside topic" +
                      std::to_string(j) + " " + hex8(doc + std::to_string(j)));
    }
    return fenced(lines);
  }

  std::string judge_reply(const std::string& prompt) const {
    const std::string query = between(prompt, "Query:\n```\n", "\n'''");
    const std::size_t doc_at = prompt.find("Document:\n```\n");
    std::string doc;
    if (doc_at != std::string::npos) {
      doc = between(prompt.substr(doc_at), "Document:\n```\n", "\n'''");
    }
    auto query_tokens = tokenizer_.tokenize(query);
    auto doc_tokens = tokenizer_.tokenize(doc);
    std::set<std::string> doc_set(doc_tokens.begin(), doc_tokens.end());
    if (query_tokens.empty()) return "0";
    std::size_t hits = 0;
    for (const std::string& t : query_tokens) hits += doc_set.count(t);
    const double containment =
        static_cast<double>(hits) / static_cast<double>(query_tokens.size());
    if (containment >= 0.8) return "3";
    if (containment >= 0.6) return "2";
    if (containment >= 0.3) return "1";
    return "0";
  }

  std::string pick_label(const std::string& prompt,
                         const std::vector<std::string>& labels) const {
    const std::string query = between(prompt, "Query: ", "\n\nOptional");
    return labels[fnv1a(query) % labels.size()];
  }

  Tokenizer tokenizer_;
};

// --- call-counting wrappers (dry-run assertions, tests) ---------------------

class CallCountingChat : public ChatProvider {
 public:
  explicit CallCountingChat(ChatProvider& inner) : inner_(inner) {}

  std::string complete(const std::string& prompt,
                       const ChatParams& params) override {
    ++calls_;
    return inner_.complete(prompt, params);
  }

  long calls() const { return calls_.load(); }

 private:
  ChatProvider& inner_;
  std::atomic<long> calls_{0};
};

class CallCountingEmbed : public EmbeddingProvider {
 public:
  explicit CallCountingEmbed(EmbeddingProvider& inner) : inner_(inner) {}

  std::vector<std::vector<double>> embed(
      const std::vector<std::string>& texts) override {
    ++calls_;
    return inner_.embed(texts);
  }

  long calls() const { return calls_.load(); }

 private:
  EmbeddingProvider& inner_;
  std::atomic<long> calls_{0};
};

class CallCountingRerank : public RerankProvider {
 public:
  explicit CallCountingRerank(RerankProvider& inner) : inner_(inner) {}

  std::vector<double> score(const std::string& query,
                            const std::vector<std::string>& docs) override {
    ++calls_;
    return inner_.score(query, docs);
  }

  std::string id() const override { return inner_.id(); }
  long calls() const { return calls_.load(); }

 private:
  RerankProvider& inner_;
  std::atomic<long> calls_{0};
};

}  // namespace airbench::providers
