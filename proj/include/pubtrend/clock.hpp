#pragma once

#include <atomic>
#include <chrono>
#include <functional>

namespace pubtrend {

/// Monotonic time source that can also wait. Injected so rate limiting and
/// backoff can be driven by a manual clock in tests.
class Clock {
  public:
    using duration = std::chrono::nanoseconds;
    using time_point = std::chrono::time_point<std::chrono::steady_clock, duration>;

    virtual ~Clock() = default;
    [[nodiscard]] virtual time_point now() = 0;
    virtual void sleep_for(duration d) = 0;
};

class SteadyClock final : public Clock {
  public:
    time_point now() override;
    void sleep_for(duration d) override;
};

/// Time only moves when sleep_for() or advance() is called.
class ManualClock final : public Clock {
  public:
    time_point now() override { return time_point(duration(ticks_.load())); }
    void sleep_for(duration d) override { advance(d); }
    void advance(duration d) {
        if (d.count() > 0) ticks_.fetch_add(d.count());
    }

  private:
    std::atomic<duration::rep> ticks_{0};
};

/// Wall-clock source for cache timestamps.
using WallClock = std::function<std::chrono::system_clock::time_point()>;

}  // namespace pubtrend
