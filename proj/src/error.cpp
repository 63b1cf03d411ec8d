#include "pubtrend/error.hpp"

namespace pubtrend {

ErrorCategory category_of(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NonOkStatus:
        case ErrorKind::MalformedBody:
        case ErrorKind::RetriesExhausted:
        case ErrorKind::ReplayMiss:
        case ErrorKind::TransportFailure:
        case ErrorKind::FixtureUnavailable:
            return ErrorCategory::Fetch;
        case ErrorKind::IoFailure:
            return ErrorCategory::Io;
        case ErrorKind::Usage:
        case ErrorKind::InvalidYear:
        case ErrorKind::InvalidTerm:
            return ErrorCategory::Config;
        default:
            return ErrorCategory::Domain;
    }
}

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::EmptyIntersection: return "EmptyIntersection";
        case ErrorKind::YearMismatch: return "YearMismatch";
        case ErrorKind::EmptySet: return "EmptySet";
        case ErrorKind::InsufficientData: return "InsufficientData";
        case ErrorKind::ZeroMean: return "ZeroMean";
        case ErrorKind::InvalidSeries: return "InvalidSeries";
        case ErrorKind::InvalidYear: return "InvalidYear";
        case ErrorKind::InvalidTerm: return "InvalidTerm";
        case ErrorKind::NonOkStatus: return "NonOkStatus";
        case ErrorKind::MalformedBody: return "MalformedBody";
        case ErrorKind::RetriesExhausted: return "RetriesExhausted";
        case ErrorKind::ReplayMiss: return "ReplayMiss";
        case ErrorKind::TransportFailure: return "TransportFailure";
        case ErrorKind::FixtureUnavailable: return "FixtureUnavailable";
        case ErrorKind::InvalidRecord: return "InvalidRecord";
        case ErrorKind::IoFailure: return "IoFailure";
        case ErrorKind::InvalidChart: return "InvalidChart";
        case ErrorKind::Usage: return "Usage";
    }
    return "Unknown";
}

}  // namespace pubtrend
