#include "covkg/rdfgen.hpp"

#include "covkg/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace covkg::rdfgen {

Slot Slot::of(rdf::Term t) {
    Slot s;
    s.kind = Kind::constant;
    s.constant = std::move(t);
    return s;
}

Slot Slot::variable(std::string name) {
    Slot s;
    s.kind = Kind::variable;
    s.name = std::move(name);
    return s;
}

Slot Slot::call(std::string fn, std::vector<Slot> args) {
    Slot s;
    s.kind = Kind::call;
    s.name = std::move(fn);
    s.args = std::move(args);
    return s;
}

std::string report_iri(const NutsCode& region, Date day) {
    return fmt::format("{}/report/{}/{}", vocab::kDataBase, region.str(), format_date(day));
}

std::string region_iri(std::string_view code) {
    return std::string(vocab::kNuts) + std::string(code);
}

void FunctionRegistry::add(std::string name, TemplateFunction fn) {
    functions_[std::move(name)] = std::move(fn);
}

const TemplateFunction* FunctionRegistry::find(std::string_view name) const {
    auto it = functions_.find(name);
    return it == functions_.end() ? nullptr : &it->second;
}

std::vector<std::string> FunctionRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, fn] : functions_) out.push_back(name);
    return out;
}

namespace {

void expect_args(std::string_view fn, std::span<const rdf::Term> args, std::size_t n) {
    if (args.size() != n) throw ValidationError(fmt::format("{} expects {} argument(s), got {}", fn, n, args.size()));
    for (const auto& a : args) {
        if (!a.is_literal()) throw ValidationError(fmt::format("{} expects literal arguments", fn));
    }
}

FunctionRegistry make_builtins() {
    FunctionRegistry r;
    r.add("mintReportIri", [](std::span<const rdf::Term> a) {
        expect_args("mintReportIri", a, 2);
        return rdf::Term::iri(report_iri(NutsCode::parse(a[0].value()), parse_date(a[1].value())));
    });
    r.add("mintInstantIri", [](std::span<const rdf::Term> a) {
        expect_args("mintInstantIri", a, 2);
        return rdf::Term::iri(report_iri(NutsCode::parse(a[0].value()), parse_date(a[1].value())) + "/time");
    });
    r.add("regionIri", [](std::span<const rdf::Term> a) {
        expect_args("regionIri", a, 1);
        return rdf::Term::iri(region_iri(NutsCode::parse(a[0].value()).str()));
    });
    r.add("xsdDateTimeStamp", [](std::span<const rdf::Term> a) {
        expect_args("xsdDateTimeStamp", a, 1);
        const Date day = parse_date(a[0].value());
        return rdf::Term::literal(format_date(day) + "T00:00:00Z", vocab::xsd_dateTimeStamp);
    });
    r.add("xsdInteger", [](std::span<const rdf::Term> a) {
        expect_args("xsdInteger", a, 1);
        const std::string& s = a[0].value();
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
            throw ValidationError("xsdInteger: not an integer: '" + s + "'");
        }
        return rdf::Term::integer(v);
    });
    r.add("xsdString", [](std::span<const rdf::Term> a) {
        expect_args("xsdString", a, 1);
        return rdf::Term::literal(a[0].value());
    });
    return r;
}

constexpr std::array<std::string_view, 5> kRecordFields{"region", "day", "infected", "regionName", "regionLevel"};

// --- template parser --------------------------------------------------------

class TemplateParser {
public:
    TemplateParser(std::string_view text, const FunctionRegistry& registry, std::span<const std::string_view> fields)
        : text_(text), registry_(registry), fields_(fields), prefixes_(vocab::standard_prefixes()) {}

    TripleTemplate parse() {
        TripleTemplate tpl;
        for (skip_space(); pos_ < text_.size(); skip_space()) {
            if (directive()) continue;
            TemplateRow row;
            row.subject = slot();
            row.predicate = slot();
            row.object = slot();
            skip_space();
            expect('.');
            check_positions(row);
            tpl.rows.push_back(std::move(row));
        }
        return tpl;
    }

private:
    [[noreturn]] void fail(const std::string& what, std::string name = {}) const {
        throw TemplateError(std::move(name), fmt::format("template line {}: {}", line_, what), row_index());
    }

    int row_index() const { return static_cast<int>(rows_seen_); }

    void skip_space() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '\n') {
                ++line_;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    void expect(char c) {
        if (pos_ >= text_.size() || text_[pos_] != c) fail(fmt::format("expected '{}'", c));
        ++pos_;
        if (c == '.') ++rows_seen_;
    }

    static bool name_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    }

    std::string_view word() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (name_char(text_[pos_]) || text_[pos_] == ':' || text_[pos_] == '.')) {
            ++pos_;
        }
        // A trailing '.' terminates the statement rather than the name.
        while (pos_ > start && text_[pos_ - 1] == '.') --pos_;
        return text_.substr(start, pos_ - start);
    }

    bool directive() {
        const std::size_t save = pos_;
        const std::size_t save_line = line_;
        std::string_view kw;
        if (text_.substr(pos_).starts_with("@prefix")) {
            pos_ += 7;
            kw = "@prefix";
        } else {
            const std::string_view w = word();
            std::string upper(w);
            std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
            if (upper != "PREFIX") {
                pos_ = save;
                line_ = save_line;
                return false;
            }
            kw = "PREFIX";
        }
        skip_space();
        const std::string_view label = word();
        if (label.empty() || label.back() != ':') fail("expected a prefix label ending in ':'");
        skip_space();
        const std::string iri = iri_ref();
        prefixes_[std::string(label.substr(0, label.size() - 1))] = iri;
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '.') ++pos_;
        else if (kw == "@prefix") fail("expected '.' after @prefix");
        return true;
    }

    std::string iri_ref() {
        if (pos_ >= text_.size() || text_[pos_] != '<') fail("expected '<'");
        const auto end = text_.find('>', pos_);
        if (end == std::string_view::npos) fail("unterminated IRI");
        std::string iri(text_.substr(pos_ + 1, end - pos_ - 1));
        pos_ = end + 1;
        if (iri.find(':') == std::string::npos) fail("IRI must be absolute: <" + iri + ">");
        return iri;
    }

    std::string expand_pname(std::string_view pname) {
        const auto colon = pname.find(':');
        auto it = prefixes_.find(pname.substr(0, colon));
        if (it == prefixes_.end()) fail(fmt::format("undeclared prefix in '{}'", pname));
        return it->second + std::string(pname.substr(colon + 1));
    }

    std::string string_literal() {
        const char quote = text_[pos_++];
        std::string out;
        while (true) {
            if (pos_ >= text_.size() || text_[pos_] == '\n') fail("unterminated string");
            const char c = text_[pos_++];
            if (c == quote) break;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (pos_ >= text_.size()) fail("unterminated escape");
            switch (const char e = text_[pos_++]) {
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            case 'r': out += '\r'; break;
            case '"':
            case '\'':
            case '\\': out += e; break;
            default: fail(fmt::format("unknown escape '\\{}'", e));
            }
        }
        return out;
    }

    Slot slot() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of template");
        const char c = text_[pos_];
        if (c == '?') {
            ++pos_;
            const std::size_t start = pos_;
            while (pos_ < text_.size() && name_char(text_[pos_])) ++pos_;
            std::string name(text_.substr(start, pos_ - start));
            if (name.empty()) fail("empty variable name");
            if (std::find(fields_.begin(), fields_.end(), name) == fields_.end()) {
                fail(fmt::format("variable ?{} is not a record field", name), name);
            }
            return Slot::variable(std::move(name));
        }
        if (c == '<') return Slot::of(rdf::Term::iri(iri_ref()));
        if (c == '"' || c == '\'') {
            std::string lexical = string_literal();
            if (text_.substr(pos_).starts_with("^^")) {
                pos_ += 2;
                std::string dt;
                if (pos_ < text_.size() && text_[pos_] == '<') {
                    dt = iri_ref();
                } else {
                    dt = expand_pname(word());
                }
                return Slot::of(rdf::Term::literal(lexical, dt));
            }
            if (pos_ < text_.size() && text_[pos_] == '@') {
                ++pos_;
                const std::size_t start = pos_;
                while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '-')) {
                    ++pos_;
                }
                return Slot::of(rdf::Term::lang_literal(lexical, text_.substr(start, pos_ - start)));
            }
            return Slot::of(rdf::Term::literal(lexical));
        }
        if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_++;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            std::string lexical(text_.substr(start, pos_ - start));
            if (lexical == "-" || lexical == "+") fail("malformed number");
            return Slot::of(rdf::Term::literal(lexical, vocab::xsd_integer));
        }
        const std::string_view w = word();
        if (w.empty()) fail(fmt::format("unexpected character '{}'", c));
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            std::string fn(w);
            if (!registry_.find(fn)) fail(fmt::format("function {} is not registered", fn), fn);
            ++pos_;
            std::vector<Slot> args;
            skip_space();
            if (pos_ < text_.size() && text_[pos_] == ')') {
                ++pos_;
                return Slot::call(std::move(fn), std::move(args));
            }
            while (true) {
                args.push_back(slot());
                skip_space();
                if (pos_ < text_.size() && text_[pos_] == ',') {
                    ++pos_;
                    continue;
                }
                expect(')');
                break;
            }
            return Slot::call(std::move(fn), std::move(args));
        }
        if (w == "a") return Slot::of(rdf::Term::iri(vocab::type));
        if (w.find(':') == std::string_view::npos) fail(fmt::format("unexpected word '{}'", w));
        return Slot::of(rdf::Term::iri(expand_pname(w)));
    }

    void check_positions(const TemplateRow& row) {
        if (row.subject.kind == Slot::Kind::constant && row.subject.constant.is_literal()) {
            fail("a literal cannot be a subject");
        }
        if (row.predicate.kind == Slot::Kind::constant && !row.predicate.constant.is_iri()) {
            fail("a predicate must be an IRI");
        }
    }

    std::string_view text_;
    const FunctionRegistry& registry_;
    std::span<const std::string_view> fields_;
    vocab::PrefixMap prefixes_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t rows_seen_ = 0;
};

class Expander {
public:
    Expander(const Bindings& bindings, const FunctionRegistry& registry, int row)
        : bindings_(bindings), registry_(registry), row_(row) {}

    rdf::Term eval(const Slot& s) const {
        switch (s.kind) {
        case Slot::Kind::constant: return s.constant;
        case Slot::Kind::variable: {
            auto it = bindings_.find(s.name);
            if (it == bindings_.end()) {
                throw TemplateError(s.name, fmt::format("unbound variable ?{} in template row {}", s.name, row_), row_);
            }
            return it->second;
        }
        case Slot::Kind::call: {
            const TemplateFunction* fn = registry_.find(s.name);
            if (!fn) throw TemplateError(s.name, fmt::format("function {} is not registered", s.name), row_);
            std::vector<rdf::Term> args;
            args.reserve(s.args.size());
            for (const auto& a : s.args) args.push_back(eval(a));
            try {
                return (*fn)(args);
            } catch (const TemplateError&) {
                throw;
            } catch (const std::exception& e) {
                throw TemplateError(s.name, fmt::format("template row {}: {}: {}", row_, s.name, e.what()), row_);
            }
        }
        }
        return {};
    }

private:
    const Bindings& bindings_;
    const FunctionRegistry& registry_;
    int row_;
};

} // namespace

const FunctionRegistry& FunctionRegistry::builtins() {
    static const FunctionRegistry instance = make_builtins();
    return instance;
}

std::span<const std::string_view> record_fields() {
    return kRecordFields;
}

Bindings bindings_for(const DailyReport& report, const Region* region) {
    Bindings b;
    b.emplace("region", rdf::Term::literal(report.region.str()));
    b.emplace("day", rdf::Term::literal(format_date(report.day)));
    b.emplace("infected", rdf::Term::literal(std::to_string(report.infected)));
    if (region) {
        b.emplace("regionName", rdf::Term::literal(region->label()));
        b.emplace("regionLevel", rdf::Term::literal(std::to_string(region->level())));
    }
    return b;
}

TripleTemplate parse_template(std::string_view text, const FunctionRegistry& registry,
                              std::span<const std::string_view> fields) {
    return TemplateParser(text, registry, fields).parse();
}

TripleTemplate load_template(const std::filesystem::path& file, const FunctionRegistry& registry) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot open template " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_template(buf.str(), registry);
}

std::vector<rdf::Triple> expand(const TripleTemplate& tpl, const Bindings& bindings, const FunctionRegistry& registry) {
    std::vector<rdf::Triple> out;
    out.reserve(tpl.rows.size());
    for (std::size_t i = 0; i < tpl.rows.size(); ++i) {
        const int row = static_cast<int>(i);
        const Expander ex(bindings, registry, row);
        rdf::Triple t{ex.eval(tpl.rows[i].subject), ex.eval(tpl.rows[i].predicate), ex.eval(tpl.rows[i].object)};
        if (t.subject.is_literal()) throw TemplateError("", fmt::format("template row {} yields a literal subject", row), row);
        if (!t.predicate.is_iri()) throw TemplateError("", fmt::format("template row {} yields a non-IRI predicate", row), row);
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<rdf::Triple> expand(const TripleTemplate& tpl, const DailyReport& report, const Region* region,
                                const FunctionRegistry& registry) {
    return expand(tpl, bindings_for(report, region), registry);
}

} // namespace covkg::rdfgen
