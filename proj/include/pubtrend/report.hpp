#pragma once

/// @file report.hpp
/// @brief CSV tables and SVG line charts for count and ratio series.
///
/// Both writers are pure functions of their input: no timestamps, no
/// randomness, locale-independent number formatting.

#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pubtrend/trend_metrics.hpp"

namespace pubtrend {

struct LabeledSeries {
    std::string label;
    std::variant<CountSeries, RatioSeries> series;
};

/// Eight-colour default palette.
[[nodiscard]] const std::vector<std::string>& default_palette();

/// Ratio formatting used in CSV cells: six significant digits, trailing
/// zeros kept ("1.00000").
[[nodiscard]] std::string format_ratio(double value);

/// Header `year,<label>...`, then one row per year ascending. Count cells are
/// integers, ratio cells use format_ratio(), undefined ratios are empty.
/// LF line endings. Series must cover identical years (Error(YearMismatch)).
void write_csv(std::span<const LabeledSeries> series, std::ostream& out);
[[nodiscard]] std::string to_csv(std::span<const LabeledSeries> series);

struct ChartSpec {
    std::string title;
    std::vector<LabeledSeries> series;
    std::string y_label;
    std::string x_label = "Year";
    int width = 900;
    int height = 540;
    std::vector<std::string> palette = default_palette();
    /// log10 y axis; zero values become gaps like undefined ones.
    bool log_scale = false;
};

/// Plot area and axis domain of a rendered chart. Exposed so callers (and
/// tests) can map data to SVG coordinates.
struct ChartGeometry {
    double plot_left, plot_right, plot_top, plot_bottom;
    int first_year, last_year;
    double y_min, y_max;  ///< in axis units (log10 of the value when log_scale)
    bool log_scale;

    [[nodiscard]] double x(int year) const;
    [[nodiscard]] double y(double value) const;
};

/// Throws Error(InvalidChart) for no series, too short a palette, series over
/// different years, or a non-positive size.
[[nodiscard]] ChartGeometry chart_geometry(const ChartSpec& spec);

/// SVG 1.1 document: one `<g class="series">` per series holding one
/// `<polyline>` per run of consecutive defined years, plus a legend in
/// series order.
[[nodiscard]] std::string render_svg(const ChartSpec& spec);

}  // namespace pubtrend
