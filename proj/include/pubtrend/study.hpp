#pragma once

/// @file study.hpp
/// @brief The `pubtrend` command: configuration loading and the
/// fetch -> cache -> normalise -> report pipeline.

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pubtrend/clock.hpp"
#include "pubtrend/entrez_query.hpp"
#include "pubtrend/keyword.hpp"
#include "pubtrend/transport.hpp"
#include "pubtrend/trend_metrics.hpp"

namespace pubtrend {

enum class FetchMode { Live, Record, Replay };

[[nodiscard]] FetchMode parse_mode(std::string_view name);

/// Exit codes of the command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitFetch = 3;
inline constexpr int kExitIo = 4;

struct StudyConfig {
    std::vector<KeywordSpec> keywords;
    std::vector<KeywordSpec> references;
    YearRange years{0, 0};
    std::string database = "pubmed";
    Field field = Field::Text;
    /// "-" means standard output.
    std::optional<std::string> csv_path;
    std::optional<std::string> svg_path;
    std::optional<Credentials> credentials;
    std::filesystem::path cache_path = "pubtrend-cache.jsonl";
    FetchMode mode = FetchMode::Live;
    std::optional<std::filesystem::path> fixture_path;
    bool stability = false;
    bool log_scale = false;
};

using Environment = std::map<std::string, std::string>;

/// Snapshot of the PUBTREND_* variables from the process environment.
[[nodiscard]] Environment process_environment();

[[nodiscard]] std::string usage_text();

/// Flags take precedence over PUBTREND_API_KEY / PUBTREND_EMAIL /
/// PUBTREND_TOOL, which take precedence over the defaults. `args` excludes
/// the program name. Throws Error(Usage) for unknown flags, missing
/// keywords or references, a reversed year range, or record/replay without
/// --fixtures.
[[nodiscard]] StudyConfig load_config(const std::vector<std::string>& args, const Environment& env);

/// Streams and factories the pipeline runs against.
struct RunContext {
    std::ostream& out;
    std::ostream& err;
    /// Creates the network transport; only invoked in live and record modes.
    std::function<std::unique_ptr<Transport>()> make_live_transport =
        [] { return std::make_unique<HttpTransport>(); };
    /// Defaults to a SteadyClock when null.
    Clock* clock = nullptr;
};

/// Runs a study. Throws pubtrend::Error; see run_command for exit codes.
void run_study(const StudyConfig& config, RunContext& context);

/// Parses, runs and maps failures to exit codes: 2 configuration, 3 network
/// or fixtures, 4 file I/O, 1 anything else. A failure writes exactly one
/// line to context.err.
[[nodiscard]] int run_command(const std::vector<std::string>& args, const Environment& env,
                              RunContext& context);

}  // namespace pubtrend
