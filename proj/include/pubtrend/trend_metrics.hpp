#pragma once

/// @file trend_metrics.hpp
/// @brief Yearly publication counts and their normalisation against
/// reference keywords.
///
/// A normalised interest value for a year is the keyword's publication count
/// divided by the count of a single reference keyword, or by the arithmetic
/// mean over a set of reference keywords. Years whose denominator is zero are
/// kept as undefined entries rather than dropped or zeroed.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pubtrend/keyword.hpp"

namespace pubtrend {

using Count = std::int64_t;

struct YearRange {
    int first;
    int last;

    [[nodiscard]] bool contains(int year) const noexcept { return year >= first && year <= last; }
    [[nodiscard]] int size() const noexcept { return last - first + 1; }
    friend bool operator==(const YearRange&, const YearRange&) = default;
};

/// Publications per year for one keyword. Counts are non-negative; years are
/// unique and ordered. Gaps are allowed until the series goes through
/// align_years().
class CountSeries {
  public:
    CountSeries(KeywordSpec keyword, std::map<int, Count> counts);

    [[nodiscard]] const KeywordSpec& keyword() const noexcept { return keyword_; }
    [[nodiscard]] const std::map<int, Count>& counts() const noexcept { return counts_; }
    [[nodiscard]] bool empty() const noexcept { return counts_.empty(); }
    /// Throws Error(InvalidSeries) on an empty series.
    [[nodiscard]] YearRange years() const;
    [[nodiscard]] bool is_contiguous() const noexcept;
    /// Count for a year, or 0 when the year is absent.
    [[nodiscard]] Count at(int year) const noexcept;

    friend bool operator==(const CountSeries&, const CountSeries&) = default;

  private:
    KeywordSpec keyword_;
    std::map<int, Count> counts_;
};

/// The reference keywords averaged in the denominator of a set normalisation.
class ComparisonSet {
  public:
    /// Throws Error(EmptySet) when no members are given.
    explicit ComparisonSet(std::vector<CountSeries> members);

    [[nodiscard]] const std::vector<CountSeries>& members() const noexcept { return members_; }
    [[nodiscard]] std::size_t n() const noexcept { return members_.size(); }
    /// "a" for one member, "mean(a, b, ...)" otherwise.
    [[nodiscard]] std::string label() const;

  private:
    std::vector<CountSeries> members_;
};

/// Normalised interest per year; std::nullopt marks an undefined year
/// (zero denominator).
class RatioSeries {
  public:
    using Value = std::optional<double>;

    RatioSeries(KeywordSpec keyword, std::string reference_label, std::map<int, Value> values);

    [[nodiscard]] const KeywordSpec& keyword() const noexcept { return keyword_; }
    [[nodiscard]] const std::string& reference_label() const noexcept { return reference_label_; }
    [[nodiscard]] const std::map<int, Value>& values() const noexcept { return values_; }
    [[nodiscard]] YearRange years() const;
    /// Defined values in year order.
    [[nodiscard]] std::vector<double> defined_values() const;

    friend bool operator==(const RatioSeries&, const RatioSeries&) = default;

  private:
    KeywordSpec keyword_;
    std::string reference_label_;
    std::map<int, Value> values_;
};

struct DipWarning {
    int year;           ///< final year of the series
    Count final_count;
    Count previous_count;
    double ratio;       ///< final_count / previous_count
};

/// Restricts every series to the common year range and fills interior gaps
/// with zero. Throws Error(EmptyIntersection) when the ranges do not overlap
/// and Error(InvalidSeries) for an empty input.
[[nodiscard]] std::vector<CountSeries> align_years(std::span<const CountSeries> series);

/// keyword / reference per year. Throws Error(YearMismatch) unless both
/// series cover exactly the same years.
[[nodiscard]] RatioSeries normalize_by_reference(const CountSeries& keyword,
                                                 const CountSeries& reference);

/// keyword / mean(references) per year. Zero-count members still take part
/// in the mean.
[[nodiscard]] RatioSeries normalize_by_set(const CountSeries& keyword,
                                           const ComparisonSet& references);

/// Coefficient of variation (sample sd / mean) over the defined values.
/// Throws Error(InsufficientData) with fewer than two defined values and
/// Error(ZeroMean) when they average to zero.
[[nodiscard]] double stability_score(const RatioSeries& ratios);

/// Flags a final year that fell below half of the year before, the usual
/// signature of indexing lag. Series shorter than two years yield nothing.
[[nodiscard]] std::optional<DipWarning> detect_trailing_dip(const CountSeries& series);

}  // namespace pubtrend
