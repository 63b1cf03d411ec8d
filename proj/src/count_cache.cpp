#include "pubtrend/count_cache.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <unistd.h>

#include "pubtrend/error.hpp"
#include "pubtrend/timestamp.hpp"

namespace pubtrend {

void CacheRecord::validate() const {
    if (count < 0) {
        throw Error(ErrorKind::InvalidRecord, "cache count must be >= 0, got " + std::to_string(count));
    }
    if (database.empty() || term_string.empty()) {
        throw Error(ErrorKind::InvalidRecord, "cache record needs a database and a term");
    }
}

std::string cache_record_to_json_line(const CacheRecord& record) {
    nlohmann::ordered_json j;
    j["db"] = record.database;
    j["term"] = record.term_string;
    j["count"] = record.count;
    j["fetched_at"] = format_utc(record.fetched_at);
    return j.dump();
}

std::optional<CacheRecord> cache_record_from_json_line(std::string_view line) {
    const auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (!j.is_object()) return std::nullopt;
    const auto db = j.find("db");
    const auto term = j.find("term");
    const auto count = j.find("count");
    const auto fetched = j.find("fetched_at");
    if (db == j.end() || term == j.end() || count == j.end() || fetched == j.end() ||
        !db->is_string() || !term->is_string() || !count->is_number_integer() ||
        !fetched->is_string()) {
        return std::nullopt;
    }
    const auto when = parse_utc(fetched->get<std::string>());
    if (!when) return std::nullopt;
    CacheRecord record{db->get<std::string>(), term->get<std::string>(),
                       count->get<std::int64_t>(), *when};
    if (record.count < 0 || record.database.empty() || record.term_string.empty()) {
        return std::nullopt;
    }
    return record;
}

CountCache::CountCache(CountCache&& other) noexcept {
    std::unique_lock lock(other.mutex_);
    path_ = std::move(other.path_);
    records_ = std::move(other.records_);
    pending_ = std::move(other.pending_);
    corrupt_lines_ = other.corrupt_lines_;
}

CountCache CountCache::load(const std::filesystem::path& path) {
    CountCache cache;
    cache.path_ = path;
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) return cache;

    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoFailure, "cannot read cache file " + path.string());
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (auto record = cache_record_from_json_line(line)) {
            cache.merge(std::move(*record));
        } else {
            ++cache.corrupt_lines_;
        }
    }
    if (in.bad()) throw Error(ErrorKind::IoFailure, "error while reading " + path.string());
    return cache;
}

void CountCache::merge(CacheRecord record) {
    Key key{record.database, record.term_string};
    const auto it = records_.find(key);
    if (it == records_.end()) {
        records_.emplace(std::move(key), std::move(record));
    } else if (record.fetched_at >= it->second.fetched_at) {
        it->second = std::move(record);
    }
}

std::optional<std::int64_t> CountCache::get(const std::string& database,
                                            const std::string& term_string,
                                            std::optional<std::chrono::seconds> max_age,
                                            std::chrono::system_clock::time_point now) const {
    std::shared_lock lock(mutex_);
    const auto it = records_.find(Key{database, term_string});
    if (it == records_.end()) return std::nullopt;
    if (max_age && now - it->second.fetched_at > *max_age) return std::nullopt;
    return it->second.count;
}

void CountCache::put(CacheRecord record) {
    record.validate();
    std::unique_lock lock(mutex_);
    pending_.push_back(record);
    merge(std::move(record));
}

void CountCache::flush() {
    std::unique_lock lock(mutex_);
    if (!path_ || pending_.empty()) {
        if (!path_) pending_.clear();
        return;
    }
    std::string payload;
    for (const auto& record : pending_) {
        payload += cache_record_to_json_line(record);
        payload += '\n';
    }

    std::FILE* file = std::fopen(path_->c_str(), "ab");
    if (file == nullptr) {
        throw Error(ErrorKind::IoFailure,
                    "cannot open cache file " + path_->string() + ": " + std::strerror(errno));
    }
    const bool written = std::fwrite(payload.data(), 1, payload.size(), file) == payload.size() &&
                         std::fflush(file) == 0 && ::fsync(::fileno(file)) == 0;
    const int saved_errno = errno;
    const bool closed = std::fclose(file) == 0;
    if (!written || !closed) {
        throw Error(ErrorKind::IoFailure, "cannot write cache file " + path_->string() + ": " +
                                              std::strerror(saved_errno));
    }
    pending_.clear();
}

std::size_t CountCache::size() const {
    std::shared_lock lock(mutex_);
    return records_.size();
}

std::size_t CountCache::pending() const {
    std::shared_lock lock(mutex_);
    return pending_.size();
}

}  // namespace pubtrend
