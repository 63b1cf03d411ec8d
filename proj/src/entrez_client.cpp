#include "pubtrend/entrez_client.hpp"

#include <charconv>
#include <cmath>
#include <json.hpp>

#include "pubtrend/error.hpp"

namespace pubtrend {

Count parse_count(const TransportResponse& response) {
    if (response.status != 200) {
        throw Error(ErrorKind::NonOkStatus, "esearch returned HTTP " + std::to_string(response.status));
    }
    const auto body = nlohmann::json::parse(response.body, nullptr, /*allow_exceptions=*/false);
    if (body.is_discarded()) {
        throw Error(ErrorKind::MalformedBody, "esearch response is not JSON");
    }
    const auto result = body.find("esearchresult");
    if (!body.is_object() || result == body.end() || !result->is_object()) {
        throw Error(ErrorKind::MalformedBody, "esearch response has no esearchresult object");
    }
    const auto count = result->find("count");
    if (count == result->end() || !count->is_string()) {
        std::string detail;
        if (const auto err = result->find("ERROR"); err != result->end() && err->is_string()) {
            detail = ": " + err->get<std::string>();
        }
        throw Error(ErrorKind::MalformedBody, "esearch response has no count" + detail);
    }
    const auto& text = count->get_ref<const std::string&>();
    Count value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || value < 0) {
        throw Error(ErrorKind::MalformedBody, "esearch count is not a decimal integer: '" + text + "'");
    }
    return value;
}

Clock::duration backoff_ceiling(const RetryPolicy& policy, int retry) {
    const double scale = std::pow(policy.factor, std::max(0, retry - 1));
    return std::chrono::duration_cast<Clock::duration>(
        std::chrono::duration<double, Clock::duration::period>(
            static_cast<double>(policy.base.count()) * scale));
}

Clock::duration backoff_delay(const RetryPolicy& policy, int retry, std::mt19937_64& rng) {
    const auto ceiling = backoff_ceiling(policy, retry).count();
    if (ceiling <= 0) return Clock::duration::zero();
    std::uniform_int_distribution<Clock::duration::rep> jitter(0, ceiling - 1);
    return Clock::duration(jitter(rng));
}

EntrezClient::EntrezClient(Transport& transport, RateLimiter& limiter, Clock& clock,
                           Options options)
    : transport_(transport),
      limiter_(limiter),
      clock_(clock),
      options_(std::move(options)),
      rng_(options_.seed) {}

EntrezClient::EntrezClient(Transport& transport, RateLimiter& limiter, Clock& clock)
    : EntrezClient(transport, limiter, clock, Options{}) {}

Count EntrezClient::fetch_count(const EntrezQuery& query) {
    const std::pair<std::string, std::string> key{query.database, query.term_string};
    {
        std::lock_guard lock(mutex_);
        if (const auto it = fetched_.find(key); it != fetched_.end()) return it->second;
    }

    EntrezQuery request = query;
    if (!request.credentials) request.credentials = options_.credentials;
    const std::string url = encode_request(request);

    const int attempts = std::max(1, options_.retry.max_attempts);
    std::string last_failure;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        if (attempt > 1) {
            Clock::duration delay;
            {
                std::lock_guard lock(mutex_);
                delay = backoff_delay(options_.retry, attempt - 1, rng_);
            }
            clock_.sleep_for(delay);
        }
        limiter_.acquire();
        TransportResponse response;
        try {
            {
                std::lock_guard lock(mutex_);
                ++transport_calls_;
            }
            response = transport_.get(url);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::TransportFailure) throw;
            last_failure = e.what();
            continue;
        }
        if (is_retryable_status(response.status)) {
            last_failure = "HTTP " + std::to_string(response.status);
            continue;
        }
        const Count count = parse_count(response);
        std::lock_guard lock(mutex_);
        fetched_.emplace(key, count);
        return count;
    }
    throw Error(ErrorKind::RetriesExhausted, "gave up after " + std::to_string(attempts) +
                                                 " attempts (last: " + last_failure + ") for " +
                                                 strip_credentials(url));
}

CountSeries EntrezClient::fetch_year_series(const KeywordSpec& spec, YearRange years,
                                            CountCache* cache,
                                            std::optional<std::chrono::seconds> max_age) {
    if (years.first > years.last) {
        throw Error(ErrorKind::InvalidYear, "empty year range " + std::to_string(years.first) +
                                                ":" + std::to_string(years.last));
    }
    std::map<int, Count> counts;
    for (int year = years.first; year <= years.last; ++year) {
        const EntrezQuery query = EntrezQuery::for_year(spec, year);
        if (cache != nullptr) {
            if (const auto hit = cache->get(query.database, query.term_string, max_age,
                                            options_.wall_clock())) {
                counts.emplace_hint(counts.end(), year, *hit);
                continue;
            }
        }
        Count count = 0;
        try {
            count = fetch_count(query);
        } catch (const Error& e) {
            throw Error(e.kind(), "'" + spec.term() + "' year " + std::to_string(year) + ": " + e.what());
        }
        if (cache != nullptr) {
            cache->put(CacheRecord{query.database, query.term_string, count, options_.wall_clock()});
        }
        counts.emplace_hint(counts.end(), year, count);
    }
    return CountSeries(spec, std::move(counts));
}

std::size_t EntrezClient::transport_calls() const {
    std::lock_guard lock(mutex_);
    return transport_calls_;
}

}  // namespace pubtrend
