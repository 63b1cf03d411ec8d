#include "pubtrend/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "pubtrend/error.hpp"

namespace pubtrend {

namespace {

using Values = std::map<int, std::optional<double>>;

Values values_of(const LabeledSeries& s) {
    return std::visit(
        [](const auto& series) {
            Values out;
            using T = std::decay_t<decltype(series)>;
            if constexpr (std::is_same_v<T, CountSeries>) {
                for (const auto& [year, count] : series.counts()) {
                    out.emplace_hint(out.end(), year, static_cast<double>(count));
                }
            } else {
                out = series.values();
            }
            return out;
        },
        s.series);
}

std::vector<int> years_of(const LabeledSeries& s) {
    std::vector<int> out;
    std::visit(
        [&out](const auto& series) {
            using T = std::decay_t<decltype(series)>;
            if constexpr (std::is_same_v<T, CountSeries>) {
                for (const auto& entry : series.counts()) out.push_back(entry.first);
            } else {
                for (const auto& entry : series.values()) out.push_back(entry.first);
            }
        },
        s.series);
    return out;
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
    std::string out = "\"";
    for (const char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string xml_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (const char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

/// Fixed two-decimal coordinate, independent of the C locale.
std::string coord(double v) {
    std::array<char, 64> buf{};
    if (std::abs(v) < 0.005) v = 0.0;  // no "-0.00"
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 2);
    return std::string(buf.data(), res.ptr);
}

/// Shortest round-trip representation for tick labels.
std::string tick_label(double v) {
    std::array<char, 64> buf{};
    if (std::abs(v) < 1e-12) v = 0.0;
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

/// Step from {1, 2, 2.5, 5} x 10^k giving roughly `target` intervals over span.
double nice_step(double span, int target) {
    const double raw = span / target;
    const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
    for (const double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (m * magnitude >= raw) return m * magnitude;
    }
    return 10.0 * magnitude;
}

int year_step(int span) {
    for (const int step : {1, 2, 5, 10, 20, 25, 50, 100, 200, 500, 1000}) {
        if (span / step <= 10) return step;
    }
    return 1000;
}

constexpr double kMarginLeft = 80.0;
constexpr double kMarginRight = 200.0;
constexpr double kMarginTop = 50.0;
constexpr double kMarginBottom = 60.0;

}  // namespace

const std::vector<std::string>& default_palette() {
    static const std::vector<std::string> palette = {
        "#1f77b4", "#2ca02c", "#9467bd", "#d62728", "#ff7f0e", "#8c564b", "#e6b800", "#17becf",
    };
    return palette;
}

std::string format_ratio(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%#.6g", value);
    return buf;
}

void write_csv(std::span<const LabeledSeries> series, std::ostream& out) {
    if (series.empty()) {
        throw Error(ErrorKind::InvalidSeries, "nothing to write: no series given");
    }
    const std::vector<int> years = years_of(series.front());
    for (const auto& s : series.subspan(1)) {
        if (years_of(s) != years) {
            throw Error(ErrorKind::YearMismatch, "series '" + s.label + "' covers different years");
        }
    }

    std::string text = "year";
    for (const auto& s : series) {
        text += ',';
        text += csv_field(s.label);
    }
    text += '\n';
    std::vector<Values> columns;
    columns.reserve(series.size());
    for (const auto& s : series) columns.push_back(values_of(s));

    for (const int year : years) {
        text += std::to_string(year);
        for (std::size_t i = 0; i < series.size(); ++i) {
            text += ',';
            if (const auto* counts = std::get_if<CountSeries>(&series[i].series)) {
                text += std::to_string(counts->counts().at(year));
            } else if (const auto& v = columns[i].at(year)) {
                text += format_ratio(*v);
            }
        }
        text += '\n';
    }
    out << text;
    if (!out) throw Error(ErrorKind::IoFailure, "failed to write CSV output");
}

std::string to_csv(std::span<const LabeledSeries> series) {
    std::ostringstream out;
    write_csv(series, out);
    return out.str();
}

double ChartGeometry::x(int year) const {
    if (first_year == last_year) return (plot_left + plot_right) / 2.0;
    return plot_left + (plot_right - plot_left) * static_cast<double>(year - first_year) /
                           static_cast<double>(last_year - first_year);
}

double ChartGeometry::y(double value) const {
    const double axis = log_scale ? std::log10(value) : value;
    return plot_bottom - (plot_bottom - plot_top) * (axis - y_min) / (y_max - y_min);
}

ChartGeometry chart_geometry(const ChartSpec& spec) {
    if (spec.series.empty()) throw Error(ErrorKind::InvalidChart, "chart needs at least one series");
    if (spec.palette.size() < spec.series.size()) {
        throw Error(ErrorKind::InvalidChart, "palette has " + std::to_string(spec.palette.size()) +
                                                 " colours for " + std::to_string(spec.series.size()) +
                                                 " series");
    }
    if (spec.width <= kMarginLeft + kMarginRight || spec.height <= kMarginTop + kMarginBottom) {
        throw Error(ErrorKind::InvalidChart, "chart is too small");
    }
    const std::vector<int> years = years_of(spec.series.front());
    if (years.empty()) throw Error(ErrorKind::InvalidChart, "series has no years");
    for (const auto& s : spec.series) {
        if (years_of(s) != years) {
            throw Error(ErrorKind::InvalidChart, "series '" + s.label + "' covers different years");
        }
    }

    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& s : spec.series) {
        for (const auto& [year, v] : values_of(s)) {
            if (!v || (spec.log_scale && *v <= 0.0)) continue;
            lo = std::min(lo, *v);
            hi = std::max(hi, *v);
        }
    }

    ChartGeometry g{};
    g.plot_left = kMarginLeft;
    g.plot_right = spec.width - kMarginRight;
    g.plot_top = kMarginTop;
    g.plot_bottom = spec.height - kMarginBottom;
    g.first_year = years.front();
    g.last_year = years.back();
    g.log_scale = spec.log_scale;
    if (spec.log_scale) {
        if (!std::isfinite(lo)) {
            lo = 1.0;
            hi = 10.0;
        }
        g.y_min = std::floor(std::log10(lo));
        g.y_max = std::ceil(std::log10(hi));
        if (g.y_max <= g.y_min) g.y_max = g.y_min + 1.0;
    } else {
        if (hi <= 0.0) hi = 1.0;
        const double step = nice_step(hi, 5);
        g.y_min = 0.0;
        g.y_max = std::ceil(hi / step - 1e-9) * step;
    }
    return g;
}

std::string render_svg(const ChartSpec& spec) {
    const ChartGeometry g = chart_geometry(spec);
    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << spec.width
        << "\" height=\"" << spec.height << "\" viewBox=\"0 0 " << spec.width << ' ' << spec.height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    svg << "<text class=\"title\" x=\"" << coord((g.plot_left + g.plot_right) / 2.0)
        << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(spec.title)
        << "</text>\n";

    // y axis: grid lines and labels
    svg << "<g class=\"y-axis\" stroke=\"#cccccc\" stroke-width=\"1\">\n";
    std::vector<double> y_ticks;
    if (g.log_scale) {
        for (double e = g.y_min; e <= g.y_max + 1e-9; e += 1.0) y_ticks.push_back(e);
    } else {
        const double step = nice_step(g.y_max, 5);
        for (int i = 0; i * step <= g.y_max + step * 1e-9; ++i) y_ticks.push_back(i * step);
    }
    for (const double t : y_ticks) {
        const double value = g.log_scale ? std::pow(10.0, t) : t;
        const double y = g.y(value);
        svg << "<line x1=\"" << coord(g.plot_left) << "\" y1=\"" << coord(y) << "\" x2=\""
            << coord(g.plot_right) << "\" y2=\"" << coord(y) << "\"/>\n";
        svg << "<text x=\"" << coord(g.plot_left - 8) << "\" y=\"" << coord(y + 4)
            << "\" text-anchor=\"end\" stroke=\"none\" fill=\"#333333\">" << tick_label(value)
            << "</text>\n";
    }
    svg << "</g>\n";

    // x axis
    svg << "<g class=\"x-axis\" stroke=\"#333333\" stroke-width=\"1\">\n";
    svg << "<line x1=\"" << coord(g.plot_left) << "\" y1=\"" << coord(g.plot_bottom) << "\" x2=\""
        << coord(g.plot_right) << "\" y2=\"" << coord(g.plot_bottom) << "\"/>\n";
    const int step = year_step(g.last_year - g.first_year);
    const int first_tick = static_cast<int>(std::ceil(static_cast<double>(g.first_year) / step)) * step;
    for (int year = first_tick; year <= g.last_year; year += step) {
        const double x = g.x(year);
        svg << "<line x1=\"" << coord(x) << "\" y1=\"" << coord(g.plot_bottom) << "\" x2=\"" << coord(x)
            << "\" y2=\"" << coord(g.plot_bottom + 5) << "\"/>\n";
        svg << "<text x=\"" << coord(x) << "\" y=\"" << coord(g.plot_bottom + 20)
            << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#333333\">" << year << "</text>\n";
    }
    svg << "</g>\n";
    svg << "<text class=\"x-label\" x=\"" << coord((g.plot_left + g.plot_right) / 2.0) << "\" y=\""
        << coord(spec.height - 15.0) << "\" text-anchor=\"middle\">" << xml_escape(spec.x_label)
        << "</text>\n";
    const double y_mid = (g.plot_top + g.plot_bottom) / 2.0;
    svg << "<text class=\"y-label\" x=\"20\" y=\"" << coord(y_mid)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " << coord(y_mid) << ")\">"
        << xml_escape(spec.y_label) << "</text>\n";

    for (std::size_t i = 0; i < spec.series.size(); ++i) {
        const auto& s = spec.series[i];
        svg << "<g class=\"series\" data-label=\"" << xml_escape(s.label) << "\" stroke=\""
            << xml_escape(spec.palette[i])
            << "\" stroke-width=\"2\" fill=\"none\" stroke-linecap=\"round\" stroke-linejoin=\"round\">\n";
        std::string points;
        auto close_run = [&] {
            if (!points.empty()) svg << "<polyline points=\"" << points << "\"/>\n";
            points.clear();
        };
        for (const auto& [year, v] : values_of(s)) {
            if (!v || (g.log_scale && *v <= 0.0)) {
                close_run();
                continue;
            }
            if (!points.empty()) points += ' ';
            points += coord(g.x(year));
            points += ',';
            points += coord(g.y(*v));
        }
        close_run();
        svg << "</g>\n";
    }

    svg << "<g class=\"legend\">\n";
    for (std::size_t i = 0; i < spec.series.size(); ++i) {
        const double y = g.plot_top + 10.0 + 20.0 * static_cast<double>(i);
        const double x = g.plot_right + 20.0;
        svg << "<g class=\"legend-entry\"><line x1=\"" << coord(x) << "\" y1=\"" << coord(y)
            << "\" x2=\"" << coord(x + 24) << "\" y2=\"" << coord(y) << "\" stroke=\""
            << xml_escape(spec.palette[i]) << "\" stroke-width=\"3\"/><text x=\"" << coord(x + 30)
            << "\" y=\"" << coord(y + 4) << "\">" << xml_escape(spec.series[i].label)
            << "</text></g>\n";
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

}  // namespace pubtrend
