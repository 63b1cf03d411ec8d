#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "pubtrend/transport.hpp"

#include <fstream>
#include <json.hpp>

#include "pubtrend/entrez_query.hpp"
#include "pubtrend/error.hpp"
#include "pubtrend/timestamp.hpp"

namespace pubtrend {

namespace {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string target;  // /path?query
};

SplitUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(ErrorKind::TransportFailure, "not an absolute URL: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpTransport::HttpTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

TransportResponse HttpTransport::get(const std::string& url) {
    const SplitUrl parts = split_url(url);
    httplib::Client client(parts.origin);
    // The URL is already encoded; re-encoding would turn the `+` separators into %2B.
    client.set_url_encode(false);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_follow_location(true);
    const httplib::Headers headers = {{"User-Agent", "pubtrend/0.1"}};
    auto result = client.Get(parts.target, headers);
    if (!result) {
        throw Error(ErrorKind::TransportFailure,
                    "request failed (" + httplib::to_string(result.error()) + "): " + url);
    }
    return {result->status, result->body};
}

std::string fixture_to_json_line(const FixtureRecord& record) {
    nlohmann::ordered_json j;
    j["url"] = record.url;
    j["status"] = record.status;
    j["body"] = record.body;
    j["recorded_at"] = record.recorded_at;
    return j.dump();
}

FixtureRecord fixture_from_json_line(std::string_view line) {
    try {
        const auto j = nlohmann::json::parse(line);
        FixtureRecord r{j.at("url").get<std::string>(), j.at("status").get<int>(),
                        j.at("body").get<std::string>(), j.value("recorded_at", std::string())};
        if (r.status < 100 || r.status > 599) {
            throw Error(ErrorKind::MalformedBody,
                        "fixture status out of range: " + std::to_string(r.status));
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::MalformedBody, std::string("bad fixture line: ") + e.what());
    }
}

RecordingTransport::RecordingTransport(Transport& inner, std::filesystem::path fixture_path,
                                       WallClock wall_clock)
    : inner_(inner), path_(std::move(fixture_path)), wall_clock_(std::move(wall_clock)) {}

TransportResponse RecordingTransport::get(const std::string& url) {
    TransportResponse response = inner_.get(url);
    const FixtureRecord record{strip_credentials(url), response.status, response.body,
                               format_utc(wall_clock_())};
    std::lock_guard lock(mutex_);
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    out << fixture_to_json_line(record) << '\n';
    out.flush();
    if (!out) {
        throw Error(ErrorKind::IoFailure, "cannot append to fixture file " + path_.string());
    }
    return response;
}

ReplayTransport::ReplayTransport(const std::filesystem::path& fixture_path) {
    std::ifstream in(fixture_path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::IoFailure, "cannot open fixture file " + fixture_path.string());
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            add(fixture_from_json_line(line));
        } catch (const Error& e) {
            throw Error(e.kind(), fixture_path.string() + ":" + std::to_string(line_no) + ": " +
                                      e.what());
        }
    }
}

void ReplayTransport::add(FixtureRecord record) {
    std::lock_guard lock(mutex_);
    std::string key = record.url;
    records_.insert_or_assign(std::move(key), std::move(record));
}

std::size_t ReplayTransport::size() const {
    std::lock_guard lock(mutex_);
    return records_.size();
}

std::size_t ReplayTransport::requests_served() const {
    std::lock_guard lock(mutex_);
    return served_;
}

TransportResponse ReplayTransport::get(const std::string& url) {
    std::lock_guard lock(mutex_);
    const auto it = records_.find(strip_credentials(url));
    if (it == records_.end()) {
        throw Error(ErrorKind::ReplayMiss, "no recorded response for " + strip_credentials(url));
    }
    ++served_;
    return {it->second.status, it->second.body};
}

}  // namespace pubtrend
