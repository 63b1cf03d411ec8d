#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pubtrend {

enum class ErrorKind {
    // trend metrics
    EmptyIntersection,
    YearMismatch,
    EmptySet,
    InsufficientData,
    ZeroMean,
    InvalidSeries,
    // query construction
    InvalidYear,
    InvalidTerm,
    // fetching
    NonOkStatus,
    MalformedBody,
    RetriesExhausted,
    ReplayMiss,
    TransportFailure,
    FixtureUnavailable,
    // storage
    InvalidRecord,
    IoFailure,
    // reporting / configuration
    InvalidChart,
    Usage,
};

/// Coarse grouping used to pick CLI exit codes.
enum class ErrorCategory { Domain, Config, Fetch, Io };

[[nodiscard]] ErrorCategory category_of(ErrorKind kind) noexcept;
[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] ErrorCategory category() const noexcept { return category_of(kind_); }

  private:
    ErrorKind kind_;
};

}  // namespace pubtrend
