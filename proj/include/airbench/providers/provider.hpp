#pragma once

#include <chrono>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "airbench/errors.hpp"

namespace airbench::providers {

/// Connection and behavior settings for one model service role.
struct ProviderConfig {
  std::string base_url;
  std::string api_key;
  std::string model_name;
  std::chrono::milliseconds timeout{30000};
  int max_retries = 3;
  std::chrono::milliseconds backoff_initial{500};
  double backoff_multiplier = 2.0;
  double rate_limit_per_minute = 600.0;
  int max_input_tokens = 512;

  void validate() const {
    if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
    if (rate_limit_per_minute <= 0.0) {
      throw ConfigError("rate_limit must be positive");
    }
    if (max_input_tokens <= 0) {
      throw ConfigError("max_input_tokens must be positive");
    }
  }
};

/// Reads role-specific environment overrides. `role` is CHAT, EMBED, or
/// RERANK; AIRBENCH_<role>_API_BASE / _API_KEY / _MODEL win over the global
/// AIRBENCH_API_BASE / AIRBENCH_API_KEY.
inline void apply_env_overrides(ProviderConfig& config,
                                const std::string& role) {
  auto getenv_opt = [](const std::string& name) -> std::optional<std::string> {
    const char* value = std::getenv(name.c_str());
    if (value == nullptr || *value == '\0') return std::nullopt;
    return std::string(value);
  };
  if (auto v = getenv_opt("AIRBENCH_API_BASE")) config.base_url = *v;
  if (auto v = getenv_opt("AIRBENCH_API_KEY")) config.api_key = *v;
  if (auto v = getenv_opt("AIRBENCH_" + role + "_API_BASE")) config.base_url = *v;
  if (auto v = getenv_opt("AIRBENCH_" + role + "_API_KEY")) config.api_key = *v;
  if (auto v = getenv_opt("AIRBENCH_" + role + "_MODEL")) config.model_name = *v;
}

/// Retryable failure: connection problems, timeouts, 408/429/5xx replies.
/// Permanent provider failures throw the ProviderError base directly.
class TransientProviderError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

struct ChatParams {
  double temperature = 0.8;
  int max_tokens = 1024;
};

/// Chat-completion service: prompt in, text reply out.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string complete(const std::string& prompt,
                               const ChatParams& params) = 0;
};

/// Text-embedding service. One vector per input, order-preserving, all of
/// equal dimension.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<std::vector<double>> embed(
      const std::vector<std::string>& texts) = 0;
};

/// Reranking service: one relevance score per document, order-preserving,
/// higher means more relevant.
class RerankProvider {
 public:
  virtual ~RerankProvider() = default;
  virtual std::vector<double> score(const std::string& query,
                                    const std::vector<std::string>& docs) = 0;
  virtual std::string id() const = 0;
};

/// Runs a callable with exponential-backoff retries. Total attempts are
/// bounded by 1 + max_retries. The sleep function is injectable so tests
/// can count attempts without waiting.
class RetryPolicy {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  RetryPolicy(int max_retries, std::chrono::milliseconds backoff_initial,
              double backoff_multiplier, Sleeper sleeper = default_sleeper())
      : max_retries_(max_retries),
        backoff_initial_(backoff_initial),
        backoff_multiplier_(backoff_multiplier),
        sleeper_(std::move(sleeper)) {}

  explicit RetryPolicy(const ProviderConfig& config)
      : RetryPolicy(config.max_retries, config.backoff_initial,
                    config.backoff_multiplier) {}

  static Sleeper default_sleeper() {
    return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }

  /// fn must throw TransientProviderError on retryable failures. Anything
  /// else, including plain ProviderError, propagates immediately.
  template <typename Fn>
  auto run(Fn&& fn) -> decltype(fn()) {
    std::chrono::milliseconds backoff = backoff_initial_;
    int attempt = 0;
    for (;;) {
      ++attempt;
      try {
        return fn();
      } catch (const TransientProviderError& e) {
        if (attempt > max_retries_) {
          throw ProviderError(std::string(e.what()) + " (after " +
                              std::to_string(attempt) + " attempts)");
        }
        sleeper_(backoff);
        backoff = std::chrono::milliseconds(static_cast<long long>(
            static_cast<double>(backoff.count()) * backoff_multiplier_));
      }
    }
  }

 private:
  int max_retries_;
  std::chrono::milliseconds backoff_initial_;
  double backoff_multiplier_;
  Sleeper sleeper_;
};

}  // namespace airbench::providers
