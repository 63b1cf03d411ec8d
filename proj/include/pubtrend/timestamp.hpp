#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace pubtrend {

/// "YYYY-MM-DDTHH:MM:SSZ", truncated to whole seconds.
[[nodiscard]] std::string format_utc(std::chrono::system_clock::time_point t);

/// Accepts the form produced by format_utc, optionally with fractional
/// seconds or a "+00:00" suffix in place of "Z".
[[nodiscard]] std::optional<std::chrono::system_clock::time_point> parse_utc(std::string_view text);

}  // namespace pubtrend
