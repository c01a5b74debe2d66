#pragma once

#include <memory>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "airbench/providers/provider.hpp"
#include "airbench/providers/rate_limiter.hpp"
#include "airbench/providers/transcript.hpp"
#include "airbench/tokenizer.hpp"

namespace airbench::providers {

namespace detail {

struct ParsedUrl {
  std::string origin;       // scheme://host[:port]
  std::string path_prefix;  // e.g. /v1 (no trailing slash)
};

inline ParsedUrl parse_base_url(const std::string& base_url) {
  const std::size_t scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("base_url must include a scheme: " + base_url);
  }
  const std::size_t path_start = base_url.find('/', scheme_end + 3);
  ParsedUrl parsed;
  if (path_start == std::string::npos) {
    parsed.origin = base_url;
  } else {
    parsed.origin = base_url.substr(0, path_start);
    parsed.path_prefix = base_url.substr(path_start);
    while (!parsed.path_prefix.empty() && parsed.path_prefix.back() == '/') {
      parsed.path_prefix.pop_back();
    }
  }
  return parsed;
}

inline bool is_transient_status(int status) {
  return status == 408 || status == 429 || status >= 500;
}

/// POSTs a JSON body and returns the parsed JSON reply; classifies failures
/// into transient (retryable) and permanent ones.
class JsonHttpClient {
 public:
  explicit JsonHttpClient(const ProviderConfig& config)
      : config_(config),
        url_(parse_base_url(config.base_url)),
        limiter_(config.rate_limit_per_minute),
        retry_(config) {
    config_.validate();
  }

  nlohmann::json post(const std::string& endpoint, const nlohmann::json& body) {
    const std::string payload = body.dump();
    const std::string path = url_.path_prefix + endpoint;
    return retry_.run([&]() -> nlohmann::json {
      limiter_.acquire();
      httplib::Client client(url_.origin);
      client.set_connection_timeout(config_.timeout);
      client.set_read_timeout(config_.timeout);
      client.set_write_timeout(config_.timeout);
      httplib::Headers headers;
      if (!config_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + config_.api_key);
      }
      auto result = client.Post(path, headers, payload, "application/json");
      if (!result) {
        throw TransientProviderError("connection to " + url_.origin +
                                     " failed: " + httplib::to_string(result.error()));
      }
      if (result->status != 200) {
        const std::string message = "POST " + path + " returned status " +
                                    std::to_string(result->status) + ": " +
                                    result->body.substr(0, 512);
        if (is_transient_status(result->status)) {
          throw TransientProviderError(message);
        }
        throw ProviderError(message);
      }
      nlohmann::json reply = nlohmann::json::parse(result->body, nullptr, false);
      if (reply.is_discarded()) {
        throw ProviderError("provider reply is not JSON: " +
                            result->body.substr(0, 512));
      }
      return reply;
    });
  }

 private:
  ProviderConfig config_;
  ParsedUrl url_;
  RateLimiter limiter_;
  RetryPolicy retry_;
};

}  // namespace detail

/// Chat completion over the de-facto open /chat/completions contract.
class HttpChatProvider : public ChatProvider {
 public:
  explicit HttpChatProvider(ProviderConfig config)
      : config_(std::move(config)), client_(config_) {}

  std::string complete(const std::string& prompt,
                       const ChatParams& params) override {
    if (prompt.empty()) throw InputError("chat prompt is empty");
    if (tokenizer_.count(prompt) >
        static_cast<std::size_t>(config_.max_input_tokens)) {
      throw InputError("chat prompt exceeds max_input_tokens=" +
                       std::to_string(config_.max_input_tokens));
    }
    nlohmann::json body;
    body["model"] = config_.model_name;
    body["messages"] = nlohmann::json::array(
        {{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = params.temperature;
    body["max_tokens"] = params.max_tokens;
    nlohmann::json reply = client_.post("/chat/completions", body);
    try {
      return reply.at("choices").at(0).at("message").at("content")
          .get<std::string>();
    } catch (const nlohmann::json::exception&) {
      throw ProviderError("chat reply missing choices[0].message.content");
    }
  }

 private:
  ProviderConfig config_;
  detail::JsonHttpClient client_;
  Tokenizer tokenizer_;
};

/// Embeddings over the de-facto open /embeddings contract. Batches inputs
/// internally; the truncation limit travels as a request parameter.
class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(ProviderConfig config,
                                 std::size_t batch_size = 128)
      : config_(std::move(config)), client_(config_), batch_size_(batch_size) {}

  std::vector<std::vector<double>> embed(
      const std::vector<std::string>& texts) override {
    std::vector<std::vector<double>> vectors;
    vectors.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += batch_size_) {
      const std::size_t end = std::min(start + batch_size_, texts.size());
      nlohmann::json body;
      body["model"] = config_.model_name;
      body["input"] = std::vector<std::string>(texts.begin() + start,
                                               texts.begin() + end);
      body["truncate"] = true;
      body["max_input_tokens"] = config_.max_input_tokens;
      nlohmann::json reply = client_.post("/embeddings", body);
      if (!reply.contains("data") || !reply["data"].is_array() ||
          reply["data"].size() != end - start) {
        throw ProviderError("embeddings reply has wrong data length");
      }
      for (const auto& item : reply["data"]) {
        vectors.push_back(item.at("embedding").get<std::vector<double>>());
      }
    }
    for (const auto& v : vectors) {
      if (v.size() != vectors.front().size()) {
        throw ProviderError("embedding dimensions differ within one call");
      }
    }
    return vectors;
  }

 private:
  ProviderConfig config_;
  detail::JsonHttpClient client_;
  std::size_t batch_size_;
};

/// Reranking over a minimal POST contract:
/// {model, query, documents} -> {scores}.
class HttpRerankProvider : public RerankProvider {
 public:
  explicit HttpRerankProvider(ProviderConfig config)
      : config_(std::move(config)), client_(config_) {}

  std::vector<double> score(const std::string& query,
                            const std::vector<std::string>& docs) override {
    if (docs.empty()) throw InputError("rerank called with no documents");
    nlohmann::json body;
    body["model"] = config_.model_name;
    body["query"] = query;
    body["documents"] = docs;
    body["truncate"] = true;
    body["max_input_tokens"] = config_.max_input_tokens;
    nlohmann::json reply = client_.post("/rerank", body);
    std::vector<double> scores;
    try {
      scores = reply.at("scores").get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      throw ProviderError("rerank reply missing scores array");
    }
    if (scores.size() != docs.size()) {
      throw ProviderError("rerank reply score count mismatch");
    }
    return scores;
  }

  std::string id() const override { return config_.model_name; }

 private:
  ProviderConfig config_;
  detail::JsonHttpClient client_;
};

}  // namespace airbench::providers
