#include <gtest/gtest.h>

#include <cstdlib>

#include "pubtrend/entrez_client.hpp"

namespace pubtrend {
namespace {

TEST(LiveSmoke, BananaCountsWithinTwentyPercent) {
    const char* enabled = std::getenv("PUBTREND_LIVE_TESTS");
    if (enabled == nullptr || std::string(enabled) != "1") {
        GTEST_SKIP() << "set PUBTREND_LIVE_TESTS=1 to query the live E-utilities API";
    }
    HttpTransport http;
    SteadyClock clock;
    Credentials credentials;
    if (const char* key = std::getenv("PUBTREND_API_KEY")) credentials.api_key = key;
    RateLimiter limiter(request_cap(credentials.has_api_key()), clock);
    EntrezClient::Options options;
    options.credentials = credentials;
    EntrezClient client(http, limiter, clock, options);
    // Counts as of February 2021; PubMed keeps re-indexing, hence the tolerance.
    for (const auto& [year, count] : std::map<int, Count>{{1980, 12}, {1990, 26}, {2000, 83}, {2010, 170}, {2019, 420}}) {
        const Count live = client.fetch_count(EntrezQuery::for_year(KeywordSpec("banana"), year));
        EXPECT_GE(live, 0.8 * count) << year;
        EXPECT_LE(live, 1.2 * count) << year;
    }
}

}  // namespace
}  // namespace pubtrend
