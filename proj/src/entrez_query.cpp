#include "pubtrend/entrez_query.hpp"

#include <array>
#include <cctype>

#include "pubtrend/error.hpp"

namespace pubtrend {

namespace {

constexpr std::array<std::string_view, 3> kCredentialParams = {"tool", "email", "api_key"};

bool is_unreserved(unsigned char c) {
    return std::isalnum(c) != 0 || c == '-' || c == '_' || c == '.' || c == '~';
}

void append_pct(std::string& out, unsigned char c) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    out += '%';
    out += kHex[c >> 4];
    out += kHex[c & 0x0F];
}

/// application/x-www-form-urlencoded value encoding.
std::string form_encode(std::string_view value) {
    std::string out;
    out.reserve(value.size());
    for (const char ch : value) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_unreserved(c)) {
            out += ch;
        } else if (c == ' ') {
            out += '+';
        } else {
            append_pct(out, c);
        }
    }
    return out;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

}  // namespace

EntrezQuery EntrezQuery::for_year(const KeywordSpec& spec, int year,
                                  std::optional<Credentials> credentials) {
    return EntrezQuery{spec.database(), build_term(spec, year), std::move(credentials)};
}

std::string build_term(const KeywordSpec& spec, int year) {
    if (year < 1000 || year > 9999) {
        throw Error(ErrorKind::InvalidYear, "year " + std::to_string(year) + " is outside 1000..9999");
    }
    std::string term;
    term.reserve(spec.term().size() + 32);
    term += '"';
    term += spec.term();
    term += "\"[";
    term += field_tag(spec.field());
    term += "]+AND+";
    term += std::to_string(year);
    term += "[pdat]";
    return term;
}

std::string encode_term(std::string_view term_string) {
    std::string out;
    out.reserve(term_string.size() * 2);
    bool quoted = false;
    for (const char ch : term_string) {
        const auto c = static_cast<unsigned char>(ch);
        if (c == '"') {
            quoted = !quoted;
            append_pct(out, c);
        } else if (c == '+') {
            if (quoted) {
                append_pct(out, c);
            } else {
                out += '+';
            }
        } else if (c == ' ') {
            out += '+';
        } else if (is_unreserved(c)) {
            out += ch;
        } else {
            append_pct(out, c);
        }
    }
    return out;
}

std::string decode_term(std::string_view encoded) {
    std::string out;
    out.reserve(encoded.size());
    bool quoted = false;
    for (std::size_t i = 0; i < encoded.size(); ++i) {
        const char c = encoded[i];
        if (c == '%') {
            if (i + 2 >= encoded.size()) {
                throw Error(ErrorKind::InvalidTerm, "truncated percent escape in term");
            }
            const int hi = hex_value(encoded[i + 1]);
            const int lo = hex_value(encoded[i + 2]);
            if (hi < 0 || lo < 0) {
                throw Error(ErrorKind::InvalidTerm, "bad percent escape in term");
            }
            const char decoded = static_cast<char>(hi * 16 + lo);
            if (decoded == '"') quoted = !quoted;
            out += decoded;
            i += 2;
        } else if (c == '+') {
            out += quoted ? ' ' : '+';
        } else {
            out += c;
        }
    }
    return out;
}

std::string encode_request(const EntrezQuery& query) {
    std::string url(kEsearchUrl);
    url += "?db=";
    url += form_encode(query.database);
    url += "&term=";
    url += encode_term(query.term_string);
    url += "&rettype=count&retmode=json";
    if (query.credentials) {
        const Credentials& c = *query.credentials;
        if (c.tool && !c.tool->empty()) url += "&tool=" + form_encode(*c.tool);
        if (c.email && !c.email->empty()) url += "&email=" + form_encode(*c.email);
        if (c.api_key && !c.api_key->empty()) url += "&api_key=" + form_encode(*c.api_key);
    }
    return url;
}

std::optional<std::string> query_parameter(std::string_view url, std::string_view name) {
    const auto q = url.find('?');
    if (q == std::string_view::npos) return std::nullopt;
    std::string_view rest = url.substr(q + 1);
    while (!rest.empty()) {
        const auto amp = rest.find('&');
        const std::string_view pair = rest.substr(0, amp);
        const auto eq = pair.find('=');
        if (pair.substr(0, eq) == name) {
            return eq == std::string_view::npos ? std::string() : std::string(pair.substr(eq + 1));
        }
        if (amp == std::string_view::npos) break;
        rest.remove_prefix(amp + 1);
    }
    return std::nullopt;
}

std::string strip_credentials(std::string_view url) {
    const auto q = url.find('?');
    if (q == std::string_view::npos) return std::string(url);
    std::string out(url.substr(0, q));
    std::string_view rest = url.substr(q + 1);
    char sep = '?';
    while (!rest.empty()) {
        const auto amp = rest.find('&');
        const std::string_view pair = rest.substr(0, amp);
        const std::string_view key = pair.substr(0, pair.find('='));
        bool secret = false;
        for (const auto p : kCredentialParams) secret = secret || key == p;
        if (!secret) {
            out += sep;
            out += pair;
            sep = '&';
        }
        if (amp == std::string_view::npos) break;
        rest.remove_prefix(amp + 1);
    }
    return out;
}

}  // namespace pubtrend
