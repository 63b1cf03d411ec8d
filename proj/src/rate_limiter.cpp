#include "pubtrend/rate_limiter.hpp"

#include <stdexcept>
#include <thread>

namespace pubtrend {

Clock::time_point SteadyClock::now() {
    return std::chrono::time_point_cast<duration>(std::chrono::steady_clock::now());
}

void SteadyClock::sleep_for(duration d) { std::this_thread::sleep_for(d); }

RateLimiter::RateLimiter(int cap, Clock& clock, Clock::duration window)
    : cap_(cap), clock_(clock), window_(window) {
    if (cap_ < 1) throw std::invalid_argument("rate limiter cap must be positive");
    if (window_ <= Clock::duration::zero()) throw std::invalid_argument("rate window must be positive");
}

Clock::time_point RateLimiter::acquire() {
    for (;;) {
        Clock::duration wait{};
        {
            std::lock_guard lock(mutex_);
            const auto now = clock_.now();
            while (!starts_.empty() && starts_.front() + window_ <= now) {
                starts_.pop_front();
            }
            if (starts_.size() < static_cast<std::size_t>(cap_)) {
                starts_.push_back(now);
                ++acquisitions_;
                return now;
            }
            wait = starts_.front() + window_ - now;
        }
        clock_.sleep_for(wait);
    }
}

std::size_t RateLimiter::acquisitions() const {
    std::lock_guard lock(mutex_);
    return acquisitions_;
}

}  // namespace pubtrend
