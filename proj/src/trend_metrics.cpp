#include "pubtrend/trend_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>

#include "pubtrend/error.hpp"

namespace pubtrend {

namespace {

bool same_years(const std::map<int, Count>& a, const std::map<int, Count>& b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(),
                      [](const auto& x, const auto& y) { return x.first == y.first; });
}

void require_same_years(const CountSeries& keyword, const CountSeries& reference) {
    if (!same_years(keyword.counts(), reference.counts())) {
        throw Error(ErrorKind::YearMismatch,
                    "year ranges differ between '" + keyword.keyword().term() + "' and '" +
                        reference.keyword().term() + "'; align the series first");
    }
}

}  // namespace

CountSeries::CountSeries(KeywordSpec keyword, std::map<int, Count> counts)
    : keyword_(std::move(keyword)), counts_(std::move(counts)) {
    for (const auto& [year, count] : counts_) {
        if (count < 0) {
            throw Error(ErrorKind::InvalidSeries, "negative count " + std::to_string(count) +
                                                      " for year " + std::to_string(year));
        }
    }
}

YearRange CountSeries::years() const {
    if (counts_.empty()) {
        throw Error(ErrorKind::InvalidSeries, "series for '" + keyword_.term() + "' is empty");
    }
    return {counts_.begin()->first, counts_.rbegin()->first};
}

bool CountSeries::is_contiguous() const noexcept {
    if (counts_.empty()) return true;
    return static_cast<std::size_t>(counts_.rbegin()->first - counts_.begin()->first + 1) ==
           counts_.size();
}

Count CountSeries::at(int year) const noexcept {
    const auto it = counts_.find(year);
    return it == counts_.end() ? 0 : it->second;
}

ComparisonSet::ComparisonSet(std::vector<CountSeries> members) : members_(std::move(members)) {
    if (members_.empty()) {
        throw Error(ErrorKind::EmptySet, "comparison set needs at least one reference keyword");
    }
}

std::string ComparisonSet::label() const {
    if (members_.size() == 1) return members_.front().keyword().term();
    std::string out = "mean(";
    for (std::size_t i = 0; i < members_.size(); ++i) {
        if (i > 0) out += ", ";
        out += members_[i].keyword().term();
    }
    return out + ")";
}

RatioSeries::RatioSeries(KeywordSpec keyword, std::string reference_label,
                         std::map<int, Value> values)
    : keyword_(std::move(keyword)),
      reference_label_(std::move(reference_label)),
      values_(std::move(values)) {
    for (const auto& [year, value] : values_) {
        if (value && (!std::isfinite(*value) || *value < 0.0)) {
            throw Error(ErrorKind::InvalidSeries,
                        "ratio for year " + std::to_string(year) + " must be finite and >= 0");
        }
    }
}

YearRange RatioSeries::years() const {
    if (values_.empty()) {
        throw Error(ErrorKind::InvalidSeries, "ratio series for '" + keyword_.term() + "' is empty");
    }
    return {values_.begin()->first, values_.rbegin()->first};
}

std::vector<double> RatioSeries::defined_values() const {
    std::vector<double> out;
    out.reserve(values_.size());
    for (const auto& [year, value] : values_) {
        if (value) out.push_back(*value);
    }
    return out;
}

std::vector<CountSeries> align_years(std::span<const CountSeries> series) {
    if (series.empty()) {
        throw Error(ErrorKind::InvalidSeries, "align_years needs at least one series");
    }
    YearRange common = series.front().years();
    for (const auto& s : series.subspan(1)) {
        const YearRange r = s.years();
        common.first = std::max(common.first, r.first);
        common.last = std::min(common.last, r.last);
    }
    if (common.first > common.last) {
        throw Error(ErrorKind::EmptyIntersection, "series share no common year");
    }

    std::vector<CountSeries> aligned;
    aligned.reserve(series.size());
    for (const auto& s : series) {
        std::map<int, Count> counts;
        for (int year = common.first; year <= common.last; ++year) {
            counts.emplace_hint(counts.end(), year, s.at(year));
        }
        aligned.emplace_back(s.keyword(), std::move(counts));
    }
    return aligned;
}

RatioSeries normalize_by_reference(const CountSeries& keyword, const CountSeries& reference) {
    require_same_years(keyword, reference);
    std::map<int, RatioSeries::Value> values;
    for (const auto& [year, count] : keyword.counts()) {
        const Count denominator = reference.counts().at(year);
        if (denominator > 0) {
            values.emplace_hint(values.end(), year,
                                static_cast<double>(count) / static_cast<double>(denominator));
        } else {
            values.emplace_hint(values.end(), year, std::nullopt);
        }
    }
    return RatioSeries(keyword.keyword(), reference.keyword().term(), std::move(values));
}

RatioSeries normalize_by_set(const CountSeries& keyword, const ComparisonSet& references) {
    for (const auto& member : references.members()) {
        require_same_years(keyword, member);
    }
    const auto n = static_cast<double>(references.n());
    std::map<int, RatioSeries::Value> values;
    for (const auto& [year, count] : keyword.counts()) {
        Count sum = 0;
        for (const auto& member : references.members()) {
            sum += member.counts().at(year);
        }
        if (sum > 0) {
            const double mean = static_cast<double>(sum) / n;
            values.emplace_hint(values.end(), year, static_cast<double>(count) / mean);
        } else {
            values.emplace_hint(values.end(), year, std::nullopt);
        }
    }
    return RatioSeries(keyword.keyword(), references.label(), std::move(values));
}

double stability_score(const RatioSeries& ratios) {
    const std::vector<double> xs = ratios.defined_values();
    if (xs.size() < 2) {
        throw Error(ErrorKind::InsufficientData,
                    "stability score needs at least two defined ratios for '" +
                        ratios.keyword().term() + "'");
    }
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (mean == 0.0) {
        throw Error(ErrorKind::ZeroMean,
                    "ratios for '" + ratios.keyword().term() + "' average to zero");
    }
    double ss = 0.0;
    for (const double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    return std::sqrt(ss / (n - 1.0)) / mean;
}

std::optional<DipWarning> detect_trailing_dip(const CountSeries& series) {
    const auto& counts = series.counts();
    if (counts.size() < 2) return std::nullopt;
    const auto last = std::prev(counts.end());
    const auto previous = std::prev(last);
    if (previous->second <= 0) return std::nullopt;
    // final < 0.5 * previous, compared exactly in integers.
    if (2 * last->second >= previous->second) return std::nullopt;
    const double ratio =
        static_cast<double>(last->second) / static_cast<double>(previous->second);
    return DipWarning{last->first, last->second, previous->second, ratio};
}

}  // namespace pubtrend
