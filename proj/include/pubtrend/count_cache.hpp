#pragma once

/// @file count_cache.hpp
/// @brief Append-only JSON-lines store of esearch counts.
///
/// Each line is `{"db":..., "term":..., "count":..., "fetched_at":...}`.
/// Records are keyed by (db, term); on duplicates the newest fetched_at wins,
/// and between equal timestamps the later line wins. Existing lines are never
/// rewritten. There is no cross-process locking: two processes appending to
/// the same file may interleave lines.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

namespace pubtrend {

struct CacheRecord {
    std::string database;
    std::string term_string;
    std::int64_t count;
    std::chrono::system_clock::time_point fetched_at;

    /// Throws Error(InvalidRecord) on a negative count or empty key.
    void validate() const;
};

class CountCache {
  public:
    /// In-memory cache; flush() is a no-op.
    CountCache() = default;
    CountCache(CountCache&& other) noexcept;
    CountCache& operator=(CountCache&&) = delete;

    /// Reads every well-formed line of `path`; malformed lines are skipped and
    /// counted in corrupt_lines(). A missing file yields an empty cache that
    /// will be created on the first flush. Throws Error(IoFailure) when the
    /// file exists but cannot be read.
    [[nodiscard]] static CountCache load(const std::filesystem::path& path);

    [[nodiscard]] std::optional<std::int64_t> get(
        const std::string& database, const std::string& term_string,
        std::optional<std::chrono::seconds> max_age = std::nullopt,
        std::chrono::system_clock::time_point now = std::chrono::system_clock::now()) const;

    /// Validates and queues the record; it is visible to get() immediately.
    void put(CacheRecord record);

    /// Appends all queued records to the backing file and syncs it.
    /// Throws Error(IoFailure).
    void flush();

    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::size_t corrupt_lines() const noexcept { return corrupt_lines_; }
    [[nodiscard]] std::size_t pending() const;
    [[nodiscard]] const std::optional<std::filesystem::path>& path() const noexcept { return path_; }

  private:
    using Key = std::pair<std::string, std::string>;

    void merge(CacheRecord record);

    std::optional<std::filesystem::path> path_;
    std::map<Key, CacheRecord> records_;
    std::vector<CacheRecord> pending_;
    std::size_t corrupt_lines_ = 0;
    mutable std::shared_mutex mutex_;
};

[[nodiscard]] std::string cache_record_to_json_line(const CacheRecord& record);
/// std::nullopt for anything that is not a valid record.
[[nodiscard]] std::optional<CacheRecord> cache_record_from_json_line(std::string_view line);

}  // namespace pubtrend
