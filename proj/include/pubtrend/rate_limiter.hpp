#pragma once

#include <chrono>
#include <deque>
#include <mutex>

#include "pubtrend/clock.hpp"

namespace pubtrend {

/// NCBI request caps: 3 per second anonymously, 10 with an API key.
[[nodiscard]] constexpr int request_cap(bool has_api_key) noexcept { return has_api_key ? 10 : 3; }

/// Sliding-window limiter: at most `cap` acquisitions in any half-open
/// window [t, t + window). Safe to share between threads.
class RateLimiter {
  public:
    RateLimiter(int cap, Clock& clock, Clock::duration window = std::chrono::seconds(1));

    /// Blocks (through the clock) until a slot is free; returns the start time
    /// granted to the caller.
    Clock::time_point acquire();

    [[nodiscard]] int cap() const noexcept { return cap_; }
    /// Total number of acquire() calls that have returned.
    [[nodiscard]] std::size_t acquisitions() const;

  private:
    int cap_;
    Clock& clock_;
    Clock::duration window_;
    mutable std::mutex mutex_;
    std::deque<Clock::time_point> starts_;
    std::size_t acquisitions_ = 0;
};

}  // namespace pubtrend
