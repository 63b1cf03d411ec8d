#include "pubtrend/study.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pubtrend/count_cache.hpp"
#include "pubtrend/entrez_client.hpp"
#include "pubtrend/error.hpp"
#include "pubtrend/rate_limiter.hpp"
#include "pubtrend/report.hpp"

namespace pubtrend {

namespace {

struct RawFlags {
    std::vector<std::string> keywords;
    std::vector<std::string> references;
    std::string years;
    std::string field = "text";
    std::string database = "pubmed";
    std::string csv;
    std::string svg;
    std::string mode = "live";
    std::string fixtures;
    std::string cache = "pubtrend-cache.jsonl";
    std::string api_key;
    std::string email;
    std::string tool;
    bool stability = false;
    bool log_scale = false;
};

void define_flags(CLI::App& app, RawFlags& f) {
    app.set_help_flag("-h,--help", "Print this help message and exit");
    app.set_config("--study", "", "Read flags from a TOML study file; command-line flags win");
    app.add_option("--keyword", f.keywords, "Keyword of interest (repeatable)");
    app.add_option("--reference", f.references,
                   "Reference keyword (repeatable; several are averaged)");
    app.add_option("--years", f.years, "Inclusive year range A:B");
    app.add_option("--field", f.field, "Search field for all keywords: text or mesh");
    app.add_option("--db", f.database, "Entrez database");
    app.add_option("--csv", f.csv, "Write ratios as CSV to this path ('-' for stdout)");
    app.add_option("--svg", f.svg, "Write a line chart of the ratios as SVG ('-' for stdout)");
    app.add_option("--mode", f.mode, "live, record or replay");
    app.add_option("--fixtures", f.fixtures, "Fixture file for record/replay modes");
    app.add_option("--cache", f.cache, "Count cache file used in live mode");
    app.add_option("--api-key", f.api_key, "NCBI API key (default: $PUBTREND_API_KEY)");
    app.add_option("--email", f.email, "Contact e-mail sent to NCBI (default: $PUBTREND_EMAIL)");
    app.add_option("--tool", f.tool, "Tool name sent to NCBI (default: $PUBTREND_TOOL)");
    app.add_flag("--stability", f.stability,
                 "Print the coefficient of variation of each keyword's ratio series");
    app.add_flag("--log-scale", f.log_scale, "Use a logarithmic y axis in the SVG chart");
}

YearRange parse_years(const std::string& text) {
    const auto colon = text.find(':');
    auto to_int = [&](const std::string& part) {
        std::size_t used = 0;
        int value = 0;
        try {
            value = std::stoi(part, &used);
        } catch (const std::exception&) {
            used = std::string::npos;
        }
        if (part.empty() || used != part.size()) {
            throw Error(ErrorKind::Usage, "--years expects A:B with integer years, got '" + text + "'");
        }
        return value;
    };
    if (colon == std::string::npos) {
        const int year = to_int(text);
        return {year, year};
    }
    const YearRange range{to_int(text.substr(0, colon)), to_int(text.substr(colon + 1))};
    if (range.first > range.last) {
        throw Error(ErrorKind::Usage, "--years start must not exceed end, got '" + text + "'");
    }
    if (range.first < 1000 || range.last > 9999) {
        throw Error(ErrorKind::Usage, "--years must lie within 1000:9999, got '" + text + "'");
    }
    return range;
}

std::string pick(const std::string& flag, const Environment& env, const char* name) {
    if (!flag.empty()) return flag;
    const auto it = env.find(name);
    return it == env.end() ? std::string() : it->second;
}

/// Writes text to a path, or stdout for "-".
void emit(const std::string& target, const std::string& text, std::ostream& out) {
    if (target == "-") {
        out << text;
        return;
    }
    std::ofstream file(target, std::ios::binary | std::ios::trunc);
    file << text;
    file.close();
    if (!file) throw Error(ErrorKind::IoFailure, "cannot write " + target);
}

int exit_code_for(const Error& e) {
    switch (e.category()) {
        case ErrorCategory::Config: return kExitUsage;
        case ErrorCategory::Fetch: return kExitFetch;
        case ErrorCategory::Io: return kExitIo;
        case ErrorCategory::Domain: return kExitFailure;
    }
    return kExitFailure;
}

std::string one_line(std::string text) {
    std::replace(text.begin(), text.end(), '\n', ' ');
    return text;
}

}  // namespace

FetchMode parse_mode(std::string_view name) {
    if (name == "live") return FetchMode::Live;
    if (name == "record") return FetchMode::Record;
    if (name == "replay") return FetchMode::Replay;
    throw Error(ErrorKind::Usage, "unknown mode '" + std::string(name) + "' (expected live, record or replay)");
}

Environment process_environment() {
    Environment env;
    for (const char* name : {"PUBTREND_API_KEY", "PUBTREND_EMAIL", "PUBTREND_TOOL"}) {
        if (const char* value = std::getenv(name)) env.emplace(name, value);
    }
    return env;
}

std::string usage_text() {
    CLI::App app("Yearly PubMed publication counts normalised by reference keywords", "pubtrend");
    RawFlags flags;
    define_flags(app, flags);
    return app.help();
}

StudyConfig load_config(const std::vector<std::string>& args, const Environment& env) {
    CLI::App app("Yearly PubMed publication counts normalised by reference keywords", "pubtrend");
    RawFlags f;
    define_flags(app, f);
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        throw Error(ErrorKind::Usage, e.what());
    }

    if (f.keywords.empty()) throw Error(ErrorKind::Usage, "at least one --keyword is required");
    if (f.references.empty()) throw Error(ErrorKind::Usage, "at least one --reference is required");
    if (f.years.empty()) throw Error(ErrorKind::Usage, "--years A:B is required");

    StudyConfig config;
    config.years = parse_years(f.years);
    config.field = parse_field(f.field);
    config.database = f.database;
    config.mode = parse_mode(f.mode);
    for (const auto& term : f.keywords) config.keywords.emplace_back(term, config.field, config.database);
    for (const auto& term : f.references) config.references.emplace_back(term, config.field, config.database);
    if (!f.csv.empty()) config.csv_path = f.csv;
    if (!f.svg.empty()) config.svg_path = f.svg;
    if (!f.fixtures.empty()) config.fixture_path = f.fixtures;
    config.cache_path = f.cache;
    config.stability = f.stability;
    config.log_scale = f.log_scale;
    if (config.mode != FetchMode::Live && !config.fixture_path) {
        throw Error(ErrorKind::Usage, "--mode record/replay requires --fixtures");
    }

    Credentials credentials;
    if (auto v = pick(f.api_key, env, "PUBTREND_API_KEY"); !v.empty()) credentials.api_key = v;
    if (auto v = pick(f.email, env, "PUBTREND_EMAIL"); !v.empty()) credentials.email = v;
    if (auto v = pick(f.tool, env, "PUBTREND_TOOL"); !v.empty()) credentials.tool = v;
    if (credentials.api_key || credentials.email || credentials.tool) config.credentials = credentials;
    return config;
}

void run_study(const StudyConfig& config, RunContext& context) {
    SteadyClock steady;
    Clock& clock = context.clock != nullptr ? *context.clock : steady;

    std::unique_ptr<Transport> live;
    std::unique_ptr<Transport> transport;
    switch (config.mode) {
        case FetchMode::Replay:
            try {
                transport = std::make_unique<ReplayTransport>(*config.fixture_path);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::IoFailure) throw;
                throw Error(ErrorKind::FixtureUnavailable, e.what());
            }
            break;
        case FetchMode::Record:
            live = context.make_live_transport();
            transport = std::make_unique<RecordingTransport>(*live, *config.fixture_path);
            break;
        case FetchMode::Live:
            live = context.make_live_transport();
            break;
    }
    Transport& active = transport ? *transport : *live;

    // Replayed responses need no throttling.
    const bool has_key = config.credentials && config.credentials->has_api_key();
    const int cap = config.mode == FetchMode::Replay ? 1 << 20 : request_cap(has_key);
    RateLimiter limiter(cap, clock);

    EntrezClient::Options options;
    if (config.mode != FetchMode::Replay) options.credentials = config.credentials;
    EntrezClient client(active, limiter, clock, options);

    // The persistent cache only serves live runs: replays must come from the
    // fixtures alone, and recordings must hit the network for every URL.
    std::optional<CountCache> cache;
    if (config.mode == FetchMode::Live) cache.emplace(CountCache::load(config.cache_path));
    if (cache && cache->corrupt_lines() > 0) {
        context.err << "pubtrend: warning: skipped " << cache->corrupt_lines()
                    << " corrupt line(s) in " << config.cache_path.string() << '\n';
    }

    std::vector<CountSeries> fetched;
    try {
        for (const auto& spec : config.keywords) {
            fetched.push_back(client.fetch_year_series(spec, config.years, cache ? &*cache : nullptr));
        }
        for (const auto& spec : config.references) {
            fetched.push_back(client.fetch_year_series(spec, config.years, cache ? &*cache : nullptr));
        }
    } catch (...) {
        if (cache) cache->flush();
        throw;
    }
    if (cache) cache->flush();

    const std::vector<CountSeries> aligned = align_years(fetched);
    const auto n_keywords = static_cast<std::ptrdiff_t>(config.keywords.size());
    std::vector<CountSeries> references(aligned.begin() + n_keywords, aligned.end());
    const ComparisonSet set(references);

    std::vector<RatioSeries> ratios;
    for (auto it = aligned.begin(); it != aligned.begin() + n_keywords; ++it) {
        ratios.push_back(set.n() == 1 ? normalize_by_reference(*it, set.members().front())
                                      : normalize_by_set(*it, set));
    }

    for (const auto& series : aligned) {
        if (const auto dip = detect_trailing_dip(series)) {
            char pct[32];
            std::snprintf(pct, sizeof pct, "%.0f%%", dip->ratio * 100.0);
            context.err << "pubtrend: warning: '" << series.keyword().term() << "' has "
                        << dip->final_count << " publications in " << dip->year << ", " << pct
                        << " of the " << dip->previous_count << " in " << dip->year - 1
                        << "; recent records may not be fully indexed yet\n";
        }
    }

    std::vector<LabeledSeries> table;
    for (const auto& r : ratios) table.push_back({r.keyword().term(), r});

    if (config.stability) {
        std::optional<std::pair<std::string, double>> best;
        for (const auto& r : ratios) {
            context.out << "stability '" << r.keyword().term() << "' vs '" << set.label() << "': ";
            try {
                const double cv = stability_score(r);
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.6f", cv);
                context.out << "cv=" << buf << '\n';
                if (!best || cv < best->second) best.emplace(r.keyword().term(), cv);
            } catch (const Error& e) {
                context.out << "n/a (" << e.what() << ")\n";
            }
        }
        if (best) context.out << "most stable: '" << best->first << "'\n";
    }

    const bool any_output = config.csv_path || config.svg_path;
    if (config.csv_path || !any_output) {
        emit(config.csv_path.value_or("-"), to_csv(table), context.out);
    }
    if (config.svg_path) {
        ChartSpec chart;
        chart.title = "Publications relative to " + set.label();
        chart.y_label = "keyword / " + set.label();
        chart.series = table;
        chart.log_scale = config.log_scale;
        if (chart.palette.size() < chart.series.size()) {
            // Cycle the default colours for large studies.
            const auto base = default_palette();
            while (chart.palette.size() < chart.series.size()) {
                chart.palette.push_back(base[chart.palette.size() % base.size()]);
            }
        }
        emit(*config.svg_path, render_svg(chart), context.out);
    }
}

int run_command(const std::vector<std::string>& args, const Environment& env, RunContext& context) {
    if (std::find_if(args.begin(), args.end(), [](const std::string& a) {
            return a == "-h" || a == "--help";
        }) != args.end()) {
        context.out << usage_text();
        return kExitOk;
    }
    try {
        const StudyConfig config = load_config(args, env);
        run_study(config, context);
        return kExitOk;
    } catch (const Error& e) {
        context.err << "pubtrend: error: " << one_line(e.what());
        if (e.kind() == ErrorKind::Usage) context.err << " (see --help)";
        context.err << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        context.err << "pubtrend: error: " << one_line(e.what()) << '\n';
        return kExitFailure;
    }
}

}  // namespace pubtrend
