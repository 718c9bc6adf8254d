#include "covkg/rdf.hpp"

#include "covkg/errors.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>

#include <fmt/format.h>

namespace covkg::rdf {

Term Term::iri(std::string_view iri) {
    Term t;
    t.kind_ = TermKind::iri;
    t.value_ = iri;
    return t;
}

Term Term::blank(std::string_view label) {
    Term t;
    t.kind_ = TermKind::blank;
    t.value_ = label;
    return t;
}

Term Term::literal(std::string_view lexical, std::string_view datatype) {
    Term t;
    t.kind_ = TermKind::literal;
    t.value_ = lexical;
    t.datatype_ = datatype;
    return t;
}

Term Term::lang_literal(std::string_view lexical, std::string_view lang) {
    Term t = literal(lexical, vocab::langString);
    t.lang_ = lang;
    return t;
}

Term Term::integer(std::int64_t value) {
    return literal(std::to_string(value), vocab::xsd_integer);
}

Format parse_format(std::string_view name) {
    if (name == "ntriples" || name == "nt") return Format::ntriples;
    if (name == "turtle" || name == "ttl") return Format::turtle;
    throw ValidationError(fmt::format("unknown RDF format '{}'", name));
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

namespace {

void append_iri(std::string& out, std::string_view iri) {
    out += '<';
    for (char c : iri) {
        const auto u = static_cast<unsigned char>(c);
        if (u <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' ||
            c == '`' || c == '\\') {
            out += fmt::format("\\u{:04X}", u);
        } else {
            out += c;
        }
    }
    out += '>';
}

void append_quoted(std::string& out, std::string_view lexical) {
    out += '"';
    for (char c : lexical) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        case '\b': out += "\\b"; break;
        case '\f': out += "\\f"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20 || c == 0x7F) {
                out += fmt::format("\\u{:04X}", static_cast<unsigned char>(c));
            } else {
                out += c;
            }
        }
    }
    out += '"';
}

bool valid_local_name(std::string_view local) {
    if (local.empty()) return false;
    if (local.front() == '-') return false;
    return std::all_of(local.begin(), local.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    });
}

void append_turtle_iri(std::string& out, std::string_view iri) {
    if (iri == vocab::type) {
        out += 'a';
        return;
    }
    if (auto compact = vocab::compact(iri)) {
        const auto colon = compact->find(':');
        if (valid_local_name(std::string_view(*compact).substr(colon + 1))) {
            out += *compact;
            return;
        }
    }
    append_iri(out, iri);
}

void append_turtle_term(std::string& out, const Term& t) {
    switch (t.kind()) {
    case TermKind::iri: append_turtle_iri(out, t.value()); return;
    case TermKind::blank: out += "_:" + t.value(); return;
    case TermKind::literal:
        append_quoted(out, t.value());
        if (!t.lang().empty()) {
            out += '@' + t.lang();
        } else if (t.datatype() != vocab::xsd_string) {
            out += "^^";
            // `a` is only valid in predicate position.
            if (t.datatype() == vocab::type) {
                append_iri(out, t.datatype());
            } else {
                append_turtle_iri(out, t.datatype());
            }
        }
        return;
    }
}

// ---------------------------------------------------------------------------
// Reader shared by both formats; N-Triples mode rejects Turtle-only syntax.
// ---------------------------------------------------------------------------

class Reader {
public:
    Reader(std::string_view doc, Format format) : doc_(doc), turtle_(format == Format::turtle) {}

    std::vector<Triple> run() {
        for (;;) {
            skip_ws();
            if (eof()) break;
            if (turtle_ && directive()) continue;
            statement();
        }
        return std::move(out_);
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw LoadError(line_, msg); }

    bool eof() const { return pos_ >= doc_.size(); }
    char peek(std::size_t ahead = 0) const { return pos_ + ahead < doc_.size() ? doc_[pos_ + ahead] : '\0'; }

    char get() {
        const char c = doc_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }

    void skip_ws() {
        while (!eof()) {
            const char c = peek();
            if (c == '#') {
                while (!eof() && peek() != '\n') get();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                get();
            } else {
                break;
            }
        }
    }

    void expect(char c) {
        skip_ws();
        if (peek() != c) fail(fmt::format("expected '{}'", c));
        get();
    }

    bool match_keyword(std::string_view kw, bool case_insensitive) {
        if (doc_.size() - pos_ < kw.size()) return false;
        for (std::size_t i = 0; i < kw.size(); ++i) {
            char c = doc_[pos_ + i];
            if (case_insensitive) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            if (c != kw[i]) return false;
        }
        const char next = peek(kw.size());
        if (std::isalnum(static_cast<unsigned char>(next)) || next == ':') return false;
        for (std::size_t i = 0; i < kw.size(); ++i) get();
        return true;
    }

    bool directive() {
        bool sparql_style = false;
        bool is_prefix = false;
        if (match_keyword("@prefix", false)) {
            is_prefix = true;
        } else if (match_keyword("@base", false)) {
        } else if (match_keyword("PREFIX", true)) {
            is_prefix = sparql_style = true;
        } else if (match_keyword("BASE", true)) {
            sparql_style = true;
        } else {
            return false;
        }
        skip_ws();
        if (is_prefix) {
            std::string label;
            while (!eof() && peek() != ':') {
                const char c = get();
                if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.') {
                    fail("malformed prefix label");
                }
                label += c;
            }
            if (eof()) fail("expected ':' in prefix declaration");
            get();
            skip_ws();
            prefixes_[label] = iri_ref();
        } else {
            base_ = iri_ref();
        }
        if (!sparql_style) expect('.');
        return true;
    }

    void statement() {
        const std::size_t start_line = line_;
        Term subject;
        skip_ws();
        if (turtle_ && peek() == '[') {
            subject = blank_property_list();
            skip_ws();
            if (peek() == '.') {
                get();
                return;
            }
        } else {
            subject = subject_term();
        }
        predicate_object_list(subject);
        skip_ws();
        if (peek() != '.') {
            line_ = std::max(line_, start_line);
            fail("expected '.' at end of statement");
        }
        get();
    }

    void predicate_object_list(const Term& subject) {
        for (;;) {
            skip_ws();
            const Term predicate = verb();
            for (;;) {
                const Term object = object_term();
                out_.push_back({subject, predicate, object});
                skip_ws();
                if (turtle_ && peek() == ',') {
                    get();
                    continue;
                }
                break;
            }
            skip_ws();
            if (turtle_ && peek() == ';') {
                while (peek() == ';') {
                    get();
                    skip_ws();
                }
                if (peek() == '.' || peek() == ']') return;
                continue;
            }
            return;
        }
    }

    Term blank_property_list() {
        get(); // '['
        Term node = Term::blank(fmt::format("anon{}", ++anon_));
        skip_ws();
        if (peek() != ']') predicate_object_list(node);
        expect(']');
        return node;
    }

    Term verb() {
        skip_ws();
        if (turtle_ && peek() == 'a') {
            const char next = peek(1);
            if (next == ' ' || next == '\t' || next == '\n' || next == '\r' || next == '<' || next == '"' ||
                next == '[' || next == '_') {
                get();
                return Term::iri(vocab::type);
            }
        }
        Term t = iri_term();
        return t;
    }

    Term subject_term() {
        skip_ws();
        if (peek() == '_' && peek(1) == ':') return blank_label();
        return iri_term();
    }

    Term object_term() {
        skip_ws();
        const char c = peek();
        if (c == '_' && peek(1) == ':') return blank_label();
        if (c == '"' || (turtle_ && c == '\'')) return literal();
        if (turtle_ && c == '[') return blank_property_list();
        if (turtle_ && c == '(') fail("RDF collections are not supported");
        if (turtle_ && (c == '+' || c == '-' || c == '.' || std::isdigit(static_cast<unsigned char>(c)))) {
            return numeric();
        }
        if (turtle_ && (match_keyword("true", false))) return Term::literal("true", vocab::xsd_boolean);
        if (turtle_ && (match_keyword("false", false))) return Term::literal("false", vocab::xsd_boolean);
        return iri_term();
    }

    Term blank_label() {
        get();
        get();
        std::string label;
        while (!eof()) {
            const char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
                static_cast<unsigned char>(c) >= 0x80) {
                label += get();
            } else if (c == '.' && (std::isalnum(static_cast<unsigned char>(peek(1))) || peek(1) == '_')) {
                label += get();
            } else {
                break;
            }
        }
        if (label.empty()) fail("empty blank node label");
        return Term::blank(label);
    }

    Term iri_term() {
        skip_ws();
        if (peek() == '<') return Term::iri(iri_ref());
        if (!turtle_) fail("expected IRI");
        return Term::iri(prefixed_name());
    }

    std::string iri_ref() {
        if (peek() != '<') fail("expected '<'");
        get();
        std::string iri;
        for (;;) {
            if (eof()) fail("unterminated IRI");
            const char c = get();
            if (c == '>') break;
            if (c == '\n' || c == ' ') fail("whitespace inside IRI");
            if (c == '\\') {
                append_utf8(iri, unicode_escape());
            } else {
                iri += c;
            }
        }
        return resolve(iri);
    }

    std::string resolve(const std::string& iri) const {
        const auto colon = iri.find(':');
        const bool absolute = colon != std::string::npos && colon > 0 &&
                              std::all_of(iri.begin(), iri.begin() + static_cast<long>(colon), [](char c) {
                                  return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
                                         c == '.';
                              });
        if (absolute) return iri;
        if (base_.empty()) fail(fmt::format("relative IRI <{}> without base", iri));
        return base_ + iri;
    }

    std::string prefixed_name() {
        std::string label;
        while (!eof() && peek() != ':') {
            const char c = peek();
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.') {
                fail(fmt::format("unexpected character '{}'", c));
            }
            label += get();
        }
        if (eof()) fail("expected prefixed name");
        get();
        auto it = prefixes_.find(label);
        if (it == prefixes_.end()) fail(fmt::format("undeclared prefix '{}:'", label));
        std::string local;
        while (!eof()) {
            const char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == ':' ||
                static_cast<unsigned char>(c) >= 0x80) {
                local += get();
            } else if (c == '.' && (std::isalnum(static_cast<unsigned char>(peek(1))) || peek(1) == '_')) {
                local += get();
            } else if (c == '\\') {
                get();
                local += get();
            } else {
                break;
            }
        }
        return it->second + local;
    }

    char32_t unicode_escape() {
        const char kind = eof() ? '\0' : get();
        std::size_t digits = kind == 'u' ? 4 : kind == 'U' ? 8 : 0;
        if (digits == 0) fail("invalid escape in IRI");
        return hex(digits);
    }

    char32_t hex(std::size_t digits) {
        char32_t cp = 0;
        for (std::size_t i = 0; i < digits; ++i) {
            if (eof()) fail("truncated unicode escape");
            const char c = get();
            cp <<= 4;
            if (c >= '0' && c <= '9') cp |= static_cast<char32_t>(c - '0');
            else if (c >= 'a' && c <= 'f') cp |= static_cast<char32_t>(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F') cp |= static_cast<char32_t>(c - 'A' + 10);
            else fail("invalid hex digit in unicode escape");
        }
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail("escaped code point out of range");
        return cp;
    }

    Term literal() {
        const char quote = get();
        bool is_long = false;
        if (turtle_ && peek() == quote && peek(1) == quote) {
            get();
            get();
            is_long = true;
        }
        std::string lexical;
        for (;;) {
            if (eof() || (!is_long && (peek() == '\n' || peek() == '\r'))) fail("unterminated string literal");
            const char c = get();
            if (c == quote) {
                if (!is_long) break;
                if (peek() == quote && peek(1) == quote) {
                    get();
                    get();
                    // Up to two extra quotes may close a long string.
                    while (peek() == quote) {
                        lexical += quote;
                        get();
                    }
                    break;
                }
                lexical += c;
                continue;
            }
            if (!is_long && (c == '\n' || c == '\r')) fail("line break inside string literal");
            if (c != '\\') {
                lexical += c;
                continue;
            }
            if (eof()) fail("unterminated escape");
            const char e = get();
            switch (e) {
            case 't': lexical += '\t'; break;
            case 'b': lexical += '\b'; break;
            case 'n': lexical += '\n'; break;
            case 'r': lexical += '\r'; break;
            case 'f': lexical += '\f'; break;
            case '"': lexical += '"'; break;
            case '\'': lexical += '\''; break;
            case '\\': lexical += '\\'; break;
            case 'u': append_utf8(lexical, hex(4)); break;
            case 'U': append_utf8(lexical, hex(8)); break;
            default: fail(fmt::format("invalid escape '\\{}'", e));
            }
        }
        if (peek() == '@') {
            get();
            std::string lang;
            while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) lang += get();
            if (lang.empty()) fail("empty language tag");
            return Term::lang_literal(lexical, lang);
        }
        if (peek() == '^' && peek(1) == '^') {
            get();
            get();
            return Term::literal(lexical, iri_term().value());
        }
        return Term::literal(lexical);
    }

    Term numeric() {
        std::string text;
        if (peek() == '+' || peek() == '-') text += get();
        bool dot = false, exponent = false;
        while (!eof()) {
            const char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c))) {
                text += get();
            } else if (c == '.' && !dot && !exponent && std::isdigit(static_cast<unsigned char>(peek(1)))) {
                dot = true;
                text += get();
            } else if ((c == 'e' || c == 'E') && !exponent) {
                exponent = true;
                text += get();
                if (peek() == '+' || peek() == '-') text += get();
            } else {
                break;
            }
        }
        if (text.empty() || text == "+" || text == "-") fail("malformed number");
        if (exponent) return Term::literal(text, vocab::xsd_double);
        if (dot) return Term::literal(text, vocab::xsd_decimal);
        return Term::literal(text, vocab::xsd_integer);
    }

    std::string_view doc_;
    bool turtle_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t anon_ = 0;
    std::string base_;
    std::map<std::string, std::string> prefixes_;
    std::vector<Triple> out_;
};

} // namespace

std::string to_ntriples(const Term& t) {
    std::string out;
    switch (t.kind()) {
    case TermKind::iri: append_iri(out, t.value()); break;
    case TermKind::blank: out = "_:" + t.value(); break;
    case TermKind::literal:
        append_quoted(out, t.value());
        if (!t.lang().empty()) {
            out += '@' + t.lang();
        } else if (t.datatype() != vocab::xsd_string) {
            out += "^^";
            append_iri(out, t.datatype());
        }
        break;
    }
    return out;
}

std::string serialize(std::span<const Triple> triples, Format format) {
    std::string out;
    if (format == Format::ntriples) {
        for (const auto& t : triples) {
            out += to_ntriples(t.subject);
            out += ' ';
            out += to_ntriples(t.predicate);
            out += ' ';
            out += to_ntriples(t.object);
            out += " .\n";
        }
        return out;
    }

    for (const auto& [label, ns] : vocab::standard_prefixes()) {
        if (label.empty()) continue;
        out += fmt::format("@prefix {}: <{}> .\n", label, ns);
    }

    // Group by subject, then by predicate, preserving first-seen order.
    std::vector<const Term*> subjects;
    std::map<Term, std::vector<std::pair<const Term*, std::vector<const Term*>>>> groups;
    for (const auto& t : triples) {
        auto [it, inserted] = groups.try_emplace(t.subject);
        if (inserted) subjects.push_back(&it->first);
        auto& preds = it->second;
        auto p = std::find_if(preds.begin(), preds.end(), [&](const auto& e) { return *e.first == t.predicate; });
        if (p == preds.end()) {
            preds.push_back({&t.predicate, {}});
            p = std::prev(preds.end());
        }
        p->second.push_back(&t.object);
    }
    for (const Term* subject : subjects) {
        out += '\n';
        append_turtle_term(out, *subject);
        const auto& preds = groups.at(*subject);
        for (std::size_t i = 0; i < preds.size(); ++i) {
            out += i == 0 ? " " : " ;\n    ";
            append_turtle_iri(out, preds[i].first->value());
            for (std::size_t j = 0; j < preds[i].second.size(); ++j) {
                out += j == 0 ? " " : ", ";
                append_turtle_term(out, *preds[i].second[j]);
            }
        }
        out += " .\n";
    }
    return out;
}

std::vector<Triple> parse(std::string_view document, Format format) {
    return Reader(document, format).run();
}

} // namespace covkg::rdf
