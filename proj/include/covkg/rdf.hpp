#pragma once

#include "covkg/vocab.hpp"

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace covkg::rdf {

enum class TermKind : std::uint8_t { iri, blank, literal };

/// RDF term. Plain literals carry xsd:string; language-tagged literals carry
/// rdf:langString.
class Term {
public:
    Term() = default;

    static Term iri(std::string_view iri);
    static Term blank(std::string_view label);
    static Term literal(std::string_view lexical, std::string_view datatype = vocab::xsd_string);
    static Term lang_literal(std::string_view lexical, std::string_view lang);
    static Term integer(std::int64_t value);

    TermKind kind() const noexcept { return kind_; }
    bool is_iri() const noexcept { return kind_ == TermKind::iri; }
    bool is_blank() const noexcept { return kind_ == TermKind::blank; }
    bool is_literal() const noexcept { return kind_ == TermKind::literal; }

    /// IRI text, blank node label, or literal lexical form.
    const std::string& value() const noexcept { return value_; }
    const std::string& datatype() const noexcept { return datatype_; }
    const std::string& lang() const noexcept { return lang_; }

    friend auto operator<=>(const Term&, const Term&) = default;
    friend bool operator==(const Term&, const Term&) = default;

private:
    TermKind kind_ = TermKind::iri;
    std::string value_;
    std::string datatype_;
    std::string lang_;
};

struct Triple {
    Term subject;
    Term predicate;
    Term object;

    friend auto operator<=>(const Triple&, const Triple&) = default;
    friend bool operator==(const Triple&, const Triple&) = default;
};

enum class Format { ntriples, turtle };

/// "ntriples"/"nt" or "turtle"/"ttl"; throws ValidationError otherwise.
Format parse_format(std::string_view name);

/// Canonical N-Triples form of one term.
std::string to_ntriples(const Term& t);

/// N-Triples: one statement per line. Turtle: prefix header from the
/// standard vocabulary, statements grouped by subject in first-seen order.
std::string serialize(std::span<const Triple> triples, Format format);

/// Parses a whole document; throws LoadError carrying the line number.
/// Turtle support covers prefixes, base, `;`/`,` lists, `a`, blank node
/// property lists, long strings and numeric/boolean shorthand.
std::vector<Triple> parse(std::string_view document, Format format);

/// Appends the UTF-8 encoding of a code point.
void append_utf8(std::string& out, char32_t cp);

} // namespace covkg::rdf
