#include "covkg/sparql.hpp"

#include "covkg/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>

namespace covkg::sparql {

namespace {

bool is_numeric_datatype(std::string_view dt) {
    static constexpr std::array<std::string_view, 14> kLocal{
        "integer", "decimal", "double", "float", "int", "long", "short", "byte", "nonNegativeInteger",
        "positiveInteger", "negativeInteger", "nonPositiveInteger", "unsignedInt", "unsignedLong"};
    if (!dt.starts_with(vocab::kXsd)) return false;
    const auto local = dt.substr(vocab::kXsd.size());
    return std::find(kLocal.begin(), kLocal.end(), local) != kLocal.end();
}

int kind_rank(const rdf::Term& t) {
    switch (t.kind()) {
    case rdf::TermKind::blank: return 0;
    case rdf::TermKind::iri: return 1;
    case rdf::TermKind::literal: return 2;
    }
    return 3;
}

template <class T>
int three_way(const T& a, const T& b) {
    return a < b ? -1 : (b < a ? 1 : 0);
}

void append_csv_field(std::string& out, const std::string& v) {
    if (v.find_first_of(",\"\r\n") == std::string::npos) {
        out += v;
        return;
    }
    out += '"';
    for (char c : v) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

} // namespace

std::optional<std::size_t> ResultSet::column(std::string_view variable) const {
    auto it = std::find(variables.begin(), variables.end(), variable);
    if (it == variables.end()) return std::nullopt;
    return static_cast<std::size_t>(it - variables.begin());
}

std::optional<double> numeric_value(const rdf::Term& t) {
    if (!t.is_literal() || !is_numeric_datatype(t.datatype())) return std::nullopt;
    const std::string& s = t.value();
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    return v;
}

int compare_for_order(const rdf::Term& a, const rdf::Term& b) {
    if (int c = three_way(kind_rank(a), kind_rank(b))) return c;
    if (a.is_literal()) {
        const auto na = numeric_value(a);
        const auto nb = numeric_value(b);
        if (na && nb) return three_way(*na, *nb);
    }
    if (int c = three_way(a.value(), b.value())) return c;
    if (int c = three_way(a.datatype(), b.datatype())) return c;
    return three_way(a.lang(), b.lang());
}

nlohmann::json to_json(const ResultSet& results) {
    nlohmann::json bindings = nlohmann::json::array();
    for (const auto& row : results.rows) {
        nlohmann::json b = nlohmann::json::object();
        for (std::size_t i = 0; i < results.variables.size(); ++i) {
            const rdf::Term& t = row[i];
            nlohmann::json v;
            switch (t.kind()) {
            case rdf::TermKind::iri: v = {{"type", "uri"}, {"value", t.value()}}; break;
            case rdf::TermKind::blank: v = {{"type", "bnode"}, {"value", t.value()}}; break;
            case rdf::TermKind::literal:
                v = {{"type", "literal"}, {"value", t.value()}};
                if (!t.lang().empty()) {
                    v["xml:lang"] = t.lang();
                } else if (t.datatype() != vocab::xsd_string) {
                    v["datatype"] = t.datatype();
                }
                break;
            }
            b[results.variables[i]] = std::move(v);
        }
        bindings.push_back(std::move(b));
    }
    return {{"head", {{"vars", results.variables}}}, {"results", {{"bindings", std::move(bindings)}}}};
}

ResultSet results_from_json(const nlohmann::json& doc) {
    ResultSet out;
    try {
        for (const auto& v : doc.at("head").at("vars")) out.variables.push_back(v.get<std::string>());
        for (const auto& b : doc.at("results").at("bindings")) {
            std::vector<rdf::Term> row;
            row.reserve(out.variables.size());
            for (const auto& var : out.variables) {
                if (!b.contains(var)) throw ValidationError("result row does not bind ?" + var);
                const auto& v = b.at(var);
                const std::string type = v.at("type").get<std::string>();
                const std::string value = v.at("value").get<std::string>();
                if (type == "uri") {
                    row.push_back(rdf::Term::iri(value));
                } else if (type == "bnode") {
                    row.push_back(rdf::Term::blank(value));
                } else if (type == "literal" || type == "typed-literal") {
                    if (v.contains("xml:lang")) {
                        row.push_back(rdf::Term::lang_literal(value, v.at("xml:lang").get<std::string>()));
                    } else if (v.contains("datatype")) {
                        row.push_back(rdf::Term::literal(value, v.at("datatype").get<std::string>()));
                    } else {
                        row.push_back(rdf::Term::literal(value));
                    }
                } else {
                    throw ValidationError("unknown binding type '" + type + "'");
                }
            }
            out.rows.push_back(std::move(row));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed results document: ") + e.what());
    }
    return out;
}

std::string to_csv(const ResultSet& results) {
    std::string out;
    for (std::size_t i = 0; i < results.variables.size(); ++i) {
        if (i) out += ',';
        append_csv_field(out, results.variables[i]);
    }
    out += "\r\n";
    for (const auto& row : results.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            append_csv_field(out, row[i].is_blank() ? "_:" + row[i].value() : row[i].value());
        }
        out += "\r\n";
    }
    return out;
}

} // namespace covkg::sparql
