#pragma once

#include <string>
#include <string_view>

namespace pubtrend {

/// PubMed search field a keyword is matched against.
enum class Field { Text, Mesh };

[[nodiscard]] std::string_view field_tag(Field field) noexcept;
/// Parses "text" or "mesh" (case-insensitive). Throws Error(Usage) otherwise.
[[nodiscard]] Field parse_field(std::string_view name);

/// A search term, the field it is matched in, and the Entrez database.
///
/// The term is stored without surrounding quotes; quoting happens when the
/// query string is assembled. Construction throws Error(InvalidTerm) for an
/// empty term or one containing a double quote.
class KeywordSpec {
  public:
    explicit KeywordSpec(std::string term, Field field = Field::Text,
                         std::string database = "pubmed");

    [[nodiscard]] const std::string& term() const noexcept { return term_; }
    [[nodiscard]] Field field() const noexcept { return field_; }
    [[nodiscard]] const std::string& database() const noexcept { return database_; }

    friend bool operator==(const KeywordSpec&, const KeywordSpec&) = default;

  private:
    std::string term_;
    Field field_;
    std::string database_;
};

}  // namespace pubtrend
