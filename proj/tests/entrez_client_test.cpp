#include <gtest/gtest.h>

#include <thread>

#include "pubtrend/entrez_client.hpp"
#include "pubtrend/error.hpp"
#include "test_support.hpp"

namespace pubtrend {
namespace {

using testing::ScriptedTransport;
using testing::esearch_body;

const std::filesystem::path kBananaFixture =
    std::filesystem::path(PUBTREND_SOURCE_DIR) / "studies/fixtures/banana.jsonl";

EntrezClient::Options seeded() {
    EntrezClient::Options o;
    o.seed = 42;
    return o;
}

ErrorKind fetch_error(EntrezClient& client, const EntrezQuery& q) {
    try {
        (void)client.fetch_count(q);
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorKind::Usage;
}

TEST(ParseCount, ReadsDecimalString) {
    EXPECT_EQ(parse_count({200, R"({"esearchresult":{"count":"420"}})"}), 420);
    EXPECT_EQ(parse_count({200, R"({"esearchresult":{"count":"0"}})"}), 0);
}

TEST(ParseCount, MalformedBodies) {
    for (const char* body : {"{}", "", "not json", R"({"esearchresult":{}})",
                             R"({"esearchresult":{"count":12}})", R"({"esearchresult":{"count":"-3"}})",
                             R"({"esearchresult":{"count":"12abc"}})", R"({"esearchresult":{"count":""}})",
                             R"({"esearchresult":{"ERROR":"Invalid query"}})", "[1,2]"}) {
        try {
            (void)parse_count({200, body});
            ADD_FAILURE() << body;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::MalformedBody) << body;
        }
    }
}

TEST(ParseCount, NonOkStatus) {
    try {
        (void)parse_count({404, R"({"esearchresult":{"count":"1"}})"});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonOkStatus);
    }
}

TEST(FetchCount, RetriesThrottlingThenSucceeds) {
    ScriptedTransport transport;
    transport.push(429, "");
    transport.push(429, "");
    transport.push(200, esearch_body(7));
    ManualClock clock;
    RateLimiter limiter(3, clock);
    EntrezClient client(transport, limiter, clock, seeded());
    EXPECT_EQ(client.fetch_count(EntrezQuery::for_year(KeywordSpec("banana"), 1990)), 7);
    EXPECT_EQ(transport.urls.size(), 3u);
    EXPECT_EQ(limiter.acquisitions(), 3u);
}

TEST(FetchCount, GivesUpAfterFiveServerErrors) {
    ScriptedTransport transport;
    for (int i = 0; i < 6; ++i) transport.push(500, "oops");
    ManualClock clock;
    RateLimiter limiter(3, clock);
    EntrezClient client(transport, limiter, clock, seeded());
    EXPECT_EQ(fetch_error(client, EntrezQuery::for_year(KeywordSpec("banana"), 1990)),
              ErrorKind::RetriesExhausted);
    EXPECT_EQ(transport.urls.size(), 5u);
}

TEST(FetchCount, ConnectionFailuresAreRetried) {
    ScriptedTransport transport;
    transport.push_failure();
    transport.push(503, "");
    transport.push(200, esearch_body(3));
    ManualClock clock;
    RateLimiter limiter(3, clock);
    EntrezClient client(transport, limiter, clock, seeded());
    EXPECT_EQ(client.fetch_count(EntrezQuery::for_year(KeywordSpec("x"), 2000)), 3);
}

TEST(FetchCount, ClientErrorsAreNotRetried) {
    ScriptedTransport transport;
    transport.push(400, "bad request");
    ManualClock clock;
    RateLimiter limiter(3, clock);
    EntrezClient client(transport, limiter, clock, seeded());
    EXPECT_EQ(fetch_error(client, EntrezQuery::for_year(KeywordSpec("x"), 2000)), ErrorKind::NonOkStatus);
    EXPECT_EQ(transport.urls.size(), 1u);
}

TEST(FetchCount, BacksOffBetweenAttempts) {
    ScriptedTransport transport;
    for (int i = 0; i < 5; ++i) transport.push(500, "");
    ManualClock clock;
    RateLimiter limiter(1000, clock);
    EntrezClient client(transport, limiter, clock, seeded());
    (void)fetch_error(client, EntrezQuery::for_year(KeywordSpec("x"), 2000));
    // Four sleeps, each below its ceiling of 1, 2, 4 and 8 seconds.
    EXPECT_LT(clock.now().time_since_epoch(), std::chrono::seconds(15));
    EXPECT_GT(clock.now().time_since_epoch(), Clock::duration::zero());
}

TEST(FetchCount, SendsCredentials) {
    ScriptedTransport transport;
    transport.push(200, esearch_body(1));
    ManualClock clock;
    RateLimiter limiter(10, clock);
    auto options = seeded();
    options.credentials = Credentials{"KEY", "pubtrend", std::nullopt};
    EntrezClient client(transport, limiter, clock, options);
    (void)client.fetch_count(EntrezQuery::for_year(KeywordSpec("x"), 2000));
    ASSERT_EQ(transport.urls.size(), 1u);
    EXPECT_TRUE(transport.urls[0].ends_with("&tool=pubtrend&api_key=KEY")) << transport.urls[0];
}

TEST(FetchCount, SameQueryFetchedOnce) {
    ScriptedTransport transport;
    transport.push(200, esearch_body(5));
    ManualClock clock;
    RateLimiter limiter(3, clock);
    EntrezClient client(transport, limiter, clock, seeded());
    const auto q = EntrezQuery::for_year(KeywordSpec("x"), 2000);
    EXPECT_EQ(client.fetch_count(q), 5);
    EXPECT_EQ(client.fetch_count(q), 5);
    EXPECT_EQ(transport.urls.size(), 1u);
}

TEST(Backoff, CeilingsDoubleFromOneSecond) {
    const RetryPolicy policy;
    EXPECT_EQ(backoff_ceiling(policy, 1), std::chrono::seconds(1));
    EXPECT_EQ(backoff_ceiling(policy, 2), std::chrono::seconds(2));
    EXPECT_EQ(backoff_ceiling(policy, 3), std::chrono::seconds(4));
    EXPECT_EQ(backoff_ceiling(policy, 4), std::chrono::seconds(8));
}

TEST(Backoff, DelaysGrowInExpectation) {
    const RetryPolicy policy;
    std::mt19937_64 rng(99);
    double previous_mean = 0.0;
    for (int retry = 1; retry <= 4; ++retry) {
        double total = 0.0;
        constexpr int kSamples = 4000;
        for (int i = 0; i < kSamples; ++i) {
            const auto d = backoff_delay(policy, retry, rng);
            ASSERT_GE(d, Clock::duration::zero());
            ASSERT_LT(d, backoff_ceiling(policy, retry));
            total += std::chrono::duration<double>(d).count();
        }
        const double mean = total / kSamples;
        EXPECT_GT(mean, previous_mean);
        // full jitter: expectation is half the ceiling
        EXPECT_NEAR(mean, std::chrono::duration<double>(backoff_ceiling(policy, retry)).count() / 2.0,
                    0.05 * std::chrono::duration<double>(backoff_ceiling(policy, retry)).count());
        previous_mean = mean;
    }
}

TEST(RateLimiter, AnonymousCapInSlidingWindow) {
    ManualClock clock;
    RateLimiter limiter(request_cap(false), clock);
    std::vector<Clock::time_point> starts;
    for (int i = 0; i < 100; ++i) {
        starts.push_back(limiter.acquire());
        clock.advance(std::chrono::milliseconds(37));
    }
    for (std::size_t i = 0; i < starts.size(); ++i) {
        std::size_t in_window = 0;
        for (std::size_t j = i; j < starts.size() && starts[j] < starts[i] + std::chrono::seconds(1); ++j) {
            ++in_window;
        }
        EXPECT_LE(in_window, 3u);
    }
}

TEST(RateLimiter, KeyedCapIsTen) {
    EXPECT_EQ(request_cap(true), 10);
    ManualClock clock;
    RateLimiter limiter(request_cap(true), clock);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(limiter.acquire().time_since_epoch(), Clock::duration::zero());
    EXPECT_EQ(limiter.acquire().time_since_epoch(), std::chrono::seconds(1));
}

TEST(RateLimiter, SharedAcrossThreads) {
    SteadyClock clock;
    const auto window = std::chrono::milliseconds(40);
    RateLimiter limiter(4, clock, window);
    std::mutex m;
    std::vector<Clock::time_point> starts;
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&] {
            for (int i = 0; i < 5; ++i) {
                const auto s = limiter.acquire();
                std::lock_guard lock(m);
                starts.push_back(s);
            }
        });
    }
    for (auto& t : threads) t.join();
    std::sort(starts.begin(), starts.end());
    ASSERT_EQ(starts.size(), 20u);
    for (std::size_t i = 4; i < starts.size(); ++i) {
        EXPECT_GE(starts[i] - starts[i - 4], window);
    }
}

TEST(Replay, BananaFixtureServesReferenceCounts) {
    ReplayTransport replay(kBananaFixture);
    testing::ForbiddenTransport unused;
    ManualClock clock;
    RateLimiter limiter(3, clock);
    EntrezClient client(replay, limiter, clock, seeded());
    EXPECT_EQ(client.fetch_count(EntrezQuery::for_year(KeywordSpec("banana"), 1980)), 12);
    const auto series = client.fetch_year_series(KeywordSpec("banana"), {1980, 1980});
    EXPECT_EQ(series.counts(), (std::map<int, Count>{{1980, 12}}));
}

TEST(Replay, MissNamesTheUrl) {
    ReplayTransport replay(kBananaFixture);
    const auto url = encode_request(EntrezQuery::for_year(KeywordSpec("banana"), 1981));
    try {
        (void)replay.get(url);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ReplayMiss);
        EXPECT_NE(std::string(e.what()).find(url), std::string::npos);
    }
}

TEST(Replay, IgnoresCredentialsWhenMatching) {
    ReplayTransport replay(kBananaFixture);
    auto q = EntrezQuery::for_year(KeywordSpec("banana"), 2019);
    q.credentials = Credentials{"SECRET", "t", "e@x"};
    EXPECT_EQ(parse_count(replay.get(encode_request(q))), 420);
}

TEST(Replay, MissingFileIsIoFailure) {
    try {
        ReplayTransport replay(std::filesystem::path("/nonexistent/fixtures.jsonl"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::IoFailure);
    }
}

TEST(Recording, WritesReplayableFixturesWithoutSecrets) {
    testing::TempDir dir;
    const auto path = dir / "rec.jsonl";
    testing::EchoCountTransport upstream;
    RecordingTransport recorder(upstream, path, [] {
        return std::chrono::system_clock::time_point(std::chrono::seconds(1612742400));
    });
    ManualClock clock;
    RateLimiter limiter(3, clock);
    auto options = seeded();
    options.credentials = Credentials{"SECRET", std::nullopt, std::nullopt};
    EntrezClient live(recorder, limiter, clock, options);
    const auto recorded = live.fetch_year_series(KeywordSpec("zqxjkvbn"), {2001, 2004});

    const std::string text = testing::read_file(path);
    EXPECT_EQ(text.find("SECRET"), std::string::npos);
    EXPECT_NE(text.find(R"("recorded_at":"2021-02-08T00:00:00Z")"), std::string::npos);

    ReplayTransport replay(path);
    EXPECT_EQ(replay.size(), 4u);
    EntrezClient offline(replay, limiter, clock, seeded());
    EXPECT_EQ(offline.fetch_year_series(KeywordSpec("zqxjkvbn"), {2001, 2004}), recorded);
}

TEST(FetchYearSeries, WarmCacheNeedsNoNetwork) {
    testing::ForbiddenTransport forbidden;
    ManualClock clock;
    RateLimiter limiter(3, clock);
    EntrezClient client(forbidden, limiter, clock, seeded());
    CountCache cache;
    const KeywordSpec spec("amygdala");
    for (int y = 1990; y <= 1995; ++y) {
        cache.put({"pubmed", build_term(spec, y), y - 1900, std::chrono::system_clock::now()});
    }
    const auto s = client.fetch_year_series(spec, {1990, 1995}, &cache);
    EXPECT_EQ(s.at(1993), 93);
    EXPECT_EQ(client.transport_calls(), 0u);
}

TEST(FetchYearSeries, MissesAreFetchedAndCached) {
    ScriptedTransport transport;
    transport.push(200, esearch_body(0));
    transport.push(200, esearch_body(4));
    ManualClock clock;
    RateLimiter limiter(3, clock);
    EntrezClient client(transport, limiter, clock, seeded());
    CountCache cache;
    const KeywordSpec spec("zqxjkvbn");
    const auto s = client.fetch_year_series(spec, {2020, 2021}, &cache);
    EXPECT_EQ(s.counts(), (std::map<int, Count>{{2020, 0}, {2021, 4}}));
    EXPECT_EQ(cache.get("pubmed", build_term(spec, 2020)), 0);
    EXPECT_EQ(cache.get("pubmed", build_term(spec, 2021)), 4);
}

TEST(FetchYearSeries, ErrorsNameTheYear) {
    ScriptedTransport transport;
    transport.push(200, esearch_body(1));
    transport.push(200, "{}");
    ManualClock clock;
    RateLimiter limiter(3, clock);
    EntrezClient client(transport, limiter, clock, seeded());
    try {
        (void)client.fetch_year_series(KeywordSpec("x"), {2000, 2001});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MalformedBody);
        EXPECT_NE(std::string(e.what()).find("year 2001"), std::string::npos) << e.what();
    }
}

TEST(FetchYearSeries, ReplayIsDeterministic) {
    ReplayTransport a(kBananaFixture);
    ReplayTransport b(kBananaFixture);
    ManualClock clock;
    RateLimiter limiter(100, clock);
    EntrezClient ca(a, limiter, clock, seeded());
    EntrezClient cb(b, limiter, clock, seeded());
    const KeywordSpec banana("banana");
    for (const int y : {1980, 1990, 2000, 2010, 2019}) {
        EXPECT_EQ(ca.fetch_year_series(banana, {y, y}), cb.fetch_year_series(banana, {y, y}));
    }
}

}  // namespace
}  // namespace pubtrend
