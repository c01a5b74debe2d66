#pragma once

#include <chrono>
#include <deque>
#include <functional>
#include <mutex>
#include <thread>

#include "airbench/errors.hpp"

namespace airbench::providers {

/// Sliding-window request limiter: at most `per_minute` grants inside any
/// 60-second window. Clock and sleep are injectable so the guarantee is
/// testable against a virtual clock.
class RateLimiter {
 public:
  using TimePoint = std::chrono::steady_clock::time_point;
  using Clock = std::function<TimePoint()>;
  using Sleeper = std::function<void(std::chrono::nanoseconds)>;

  explicit RateLimiter(double per_minute,
                       Clock clock = [] { return std::chrono::steady_clock::now(); },
                       Sleeper sleeper =
                           [](std::chrono::nanoseconds d) {
                             std::this_thread::sleep_for(d);
                           })
      : limit_(static_cast<std::size_t>(per_minute)),
        clock_(std::move(clock)),
        sleeper_(std::move(sleeper)) {
    if (per_minute < 1.0) throw ConfigError("rate limit must be at least 1/min");
  }

  /// Blocks until issuing one more request keeps the window within limit.
  void acquire() {
    constexpr auto kWindow = std::chrono::seconds(60);
    std::unique_lock<std::mutex> lock(mutex_);
    for (;;) {
      const TimePoint now = clock_();
      while (!grants_.empty() && now - grants_.front() >= kWindow) {
        grants_.pop_front();
      }
      if (grants_.size() < limit_) {
        grants_.push_back(now);
        return;
      }
      const auto wait = grants_.front() + kWindow - now;
      lock.unlock();
      sleeper_(std::chrono::duration_cast<std::chrono::nanoseconds>(wait));
      lock.lock();
    }
  }

 private:
  std::size_t limit_;
  Clock clock_;
  Sleeper sleeper_;
  std::mutex mutex_;
  std::deque<TimePoint> grants_;
};

}  // namespace airbench::providers
