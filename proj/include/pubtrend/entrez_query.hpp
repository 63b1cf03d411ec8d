#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "pubtrend/keyword.hpp"

namespace pubtrend {

inline constexpr std::string_view kEsearchUrl =
    "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/esearch.fcgi";

/// NCBI etiquette parameters. Empty members are not sent.
struct Credentials {
    std::optional<std::string> api_key;
    std::optional<std::string> tool;
    std::optional<std::string> email;

    [[nodiscard]] bool has_api_key() const noexcept { return api_key && !api_key->empty(); }
    friend bool operator==(const Credentials&, const Credentials&) = default;
};

/// An esearch request that asks only for the number of matching records.
struct EntrezQuery {
    static constexpr bool count_only = true;

    std::string database;
    std::string term_string;
    std::optional<Credentials> credentials;

    [[nodiscard]] static EntrezQuery for_year(const KeywordSpec& spec, int year,
                                              std::optional<Credentials> credentials = std::nullopt);
};

/// `"<term>"[<field>]+AND+<year>[pdat]`, not yet URL-encoded. The `+`
/// separators are already in their URL form.
/// Throws Error(InvalidYear) outside 1000..9999.
[[nodiscard]] std::string build_term(const KeywordSpec& spec, int year);

/// Full esearch URL. Parameter order is fixed:
/// db, term, rettype, retmode, tool, email, api_key.
[[nodiscard]] std::string encode_request(const EntrezQuery& query);

/// URL-encodes a term string. Inside the quoted keyword a space becomes `+`
/// and a literal `+` becomes %2B; outside the quotes `+` is passed through.
[[nodiscard]] std::string encode_term(std::string_view term_string);

/// Exact inverse of encode_term.
[[nodiscard]] std::string decode_term(std::string_view encoded);

/// Value of a query parameter in a URL, still encoded.
[[nodiscard]] std::optional<std::string> query_parameter(std::string_view url,
                                                         std::string_view name);

/// The URL without tool, email and api_key parameters. Fixture files are
/// keyed on this form so that secrets never end up in recordings.
[[nodiscard]] std::string strip_credentials(std::string_view url);

}  // namespace pubtrend
