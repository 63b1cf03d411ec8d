#include "pubtrend/keyword.hpp"

#include <algorithm>
#include <cctype>

#include "pubtrend/error.hpp"

namespace pubtrend {

std::string_view field_tag(Field field) noexcept {
    // Lowercase [text] as in the canonical H1N1 query; MeSH keeps its
    // conventional uppercase tag.
    return field == Field::Text ? "text" : "MESH";
}

Field parse_field(std::string_view name) {
    std::string lowered(name);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lowered == "text") return Field::Text;
    if (lowered == "mesh") return Field::Mesh;
    throw Error(ErrorKind::Usage, "unknown field '" + std::string(name) + "' (expected text or mesh)");
}

KeywordSpec::KeywordSpec(std::string term, Field field, std::string database)
    : term_(std::move(term)), field_(field), database_(std::move(database)) {
    const bool blank = std::all_of(term_.begin(), term_.end(),
                                   [](unsigned char c) { return std::isspace(c) != 0; });
    if (blank) {
        throw Error(ErrorKind::InvalidTerm, "search term is empty");
    }
    if (term_.find('"') != std::string::npos) {
        throw Error(ErrorKind::InvalidTerm,
                    "search term must not contain double quotes: " + term_);
    }
    if (database_.empty()) {
        throw Error(ErrorKind::InvalidTerm, "database name is empty");
    }
}

}  // namespace pubtrend
