#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <string_view>

#include "pubtrend/clock.hpp"

namespace pubtrend {

struct TransportResponse {
    int status;
    std::string body;
};

/// Performs a single HTTP GET. Implementations throw Error(TransportFailure)
/// when no response was obtained at all.
class Transport {
  public:
    virtual ~Transport() = default;
    virtual TransportResponse get(const std::string& url) = 0;
};

/// Talks to the network over HTTPS.
class HttpTransport final : public Transport {
  public:
    explicit HttpTransport(std::chrono::seconds timeout = std::chrono::seconds(30));
    TransportResponse get(const std::string& url) override;

  private:
    std::chrono::seconds timeout_;
};

/// One line of a fixture file.
struct FixtureRecord {
    std::string url;
    int status;
    std::string body;
    std::string recorded_at;  ///< ISO-8601 UTC
};

[[nodiscard]] std::string fixture_to_json_line(const FixtureRecord& record);
/// Throws Error(MalformedBody) on a line that is not a fixture object.
[[nodiscard]] FixtureRecord fixture_from_json_line(std::string_view line);

/// Forwards to an inner transport and appends every exchange to a
/// JSON-lines fixture file.
class RecordingTransport final : public Transport {
  public:
    RecordingTransport(Transport& inner, std::filesystem::path fixture_path,
                       WallClock wall_clock = std::chrono::system_clock::now);
    TransportResponse get(const std::string& url) override;

  private:
    Transport& inner_;
    std::filesystem::path path_;
    WallClock wall_clock_;
    std::mutex mutex_;
};

/// Serves responses from a fixture file only. Lookups use the URL with
/// credentials stripped and must match byte for byte; a later line for the
/// same URL replaces an earlier one.
class ReplayTransport final : public Transport {
  public:
    ReplayTransport() = default;
    /// Throws Error(IoFailure) if the file cannot be read and
    /// Error(MalformedBody) on an unparseable line.
    explicit ReplayTransport(const std::filesystem::path& fixture_path);

    void add(FixtureRecord record);

    /// Throws Error(ReplayMiss) naming the URL when nothing was recorded.
    TransportResponse get(const std::string& url) override;

    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::size_t requests_served() const;

  private:
    std::map<std::string, FixtureRecord, std::less<>> records_;
    std::size_t served_ = 0;
    mutable std::mutex mutex_;
};

}  // namespace pubtrend
