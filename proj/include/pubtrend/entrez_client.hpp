#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <utility>

#include "pubtrend/clock.hpp"
#include "pubtrend/count_cache.hpp"
#include "pubtrend/entrez_query.hpp"
#include "pubtrend/rate_limiter.hpp"
#include "pubtrend/transport.hpp"
#include "pubtrend/trend_metrics.hpp"

namespace pubtrend {

/// Extracts esearchresult.count from an esearch JSON body.
/// Throws Error(NonOkStatus) unless status is 200, Error(MalformedBody) if
/// the count is missing or not a decimal string.
[[nodiscard]] Count parse_count(const TransportResponse& response);

/// Exponential backoff with full jitter: before retry k (k = 1, 2, ...) the
/// client sleeps a uniform draw from [0, base * factor^(k-1)).
struct RetryPolicy {
    int max_attempts = 5;
    Clock::duration base = std::chrono::seconds(1);
    double factor = 2.0;
};

/// Upper bound of the jitter interval before retry `retry` (1-based).
[[nodiscard]] Clock::duration backoff_ceiling(const RetryPolicy& policy, int retry);
[[nodiscard]] Clock::duration backoff_delay(const RetryPolicy& policy, int retry,
                                            std::mt19937_64& rng);

/// True for responses worth retrying: 429 and 5xx.
[[nodiscard]] constexpr bool is_retryable_status(int status) noexcept {
    return status == 429 || (status >= 500 && status <= 599);
}

/// Fetches esearch counts through a transport, respecting a shared rate
/// limiter. Each (database, term) is requested from the transport at most
/// once per client instance. Safe to call from several threads.
class EntrezClient {
  public:
    struct Options {
        RetryPolicy retry;
        std::optional<Credentials> credentials;
        std::uint64_t seed = std::random_device{}();
        WallClock wall_clock = std::chrono::system_clock::now;
    };

    EntrezClient(Transport& transport, RateLimiter& limiter, Clock& clock, Options options);
    EntrezClient(Transport& transport, RateLimiter& limiter, Clock& clock);

    /// Throws Error(RetriesExhausted) after max_attempts retryable failures;
    /// Error(ReplayMiss), Error(NonOkStatus) and Error(MalformedBody) pass
    /// through without retrying.
    [[nodiscard]] Count fetch_count(const EntrezQuery& query);

    /// One count per year of `years`, cache first. Fetched counts are put in
    /// the cache (not flushed). Errors are rethrown with the year prepended.
    [[nodiscard]] CountSeries fetch_year_series(const KeywordSpec& spec, YearRange years,
                                                CountCache* cache = nullptr,
                                                std::optional<std::chrono::seconds> max_age = std::nullopt);

    /// Number of transport calls made, retries included.
    [[nodiscard]] std::size_t transport_calls() const;

  private:
    Transport& transport_;
    RateLimiter& limiter_;
    Clock& clock_;
    Options options_;
    mutable std::mutex mutex_;
    std::mt19937_64 rng_;
    std::map<std::pair<std::string, std::string>, Count> fetched_;
    std::size_t transport_calls_ = 0;
};

}  // namespace pubtrend
