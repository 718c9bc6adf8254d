#pragma once

#include "covkg/model.hpp"
#include "covkg/rdf.hpp"
#include "covkg/vocab.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

/// Triples templates: each row's slots hold a constant, a record variable or
/// a function call, and the template is expanded once per record.
namespace covkg::rdfgen {

struct Slot {
    enum class Kind { constant, variable, call };

    Kind kind = Kind::constant;
    rdf::Term constant;
    std::string name; // variable or function name
    std::vector<Slot> args;

    static Slot of(rdf::Term t);
    static Slot variable(std::string name);
    static Slot call(std::string fn, std::vector<Slot> args);
};

struct TemplateRow {
    Slot subject;
    Slot predicate;
    Slot object;
};

struct TripleTemplate {
    std::vector<TemplateRow> rows;
};

/// Functions receive evaluated arguments; record variables arrive as plain
/// string literals. Failures are reported by throwing.
using TemplateFunction = std::function<rdf::Term(std::span<const rdf::Term>)>;

class FunctionRegistry {
public:
    void add(std::string name, TemplateFunction fn);
    const TemplateFunction* find(std::string_view name) const;
    std::vector<std::string> names() const;

    /// mintReportIri(region, day), mintInstantIri(region, day),
    /// regionIri(code), xsdDateTimeStamp(day), xsdInteger(n), xsdString(s).
    static const FunctionRegistry& builtins();

private:
    std::map<std::string, TemplateFunction, std::less<>> functions_;
};

/// Variables a DailyReport (plus optional Region context) binds: region,
/// day, infected, and with a Region: regionName, regionLevel.
std::span<const std::string_view> record_fields();

using Bindings = std::map<std::string, rdf::Term, std::less<>>;

Bindings bindings_for(const DailyReport& report, const Region* region = nullptr);

/// Template document grammar (one triple per statement):
///
///   document  := (directive | statement)*
///   directive := ('@prefix' | 'PREFIX') PNAME_NS IRIREF '.'?
///   statement := slot slot slot '.'
///   slot      := '?' NAME | NAME '(' (slot (',' slot)*)? ')' | IRIREF
///              | PNAME | 'a' | STRING ('^^' (IRIREF | PNAME) | LANGTAG)?
///              | INTEGER
///
/// '#' starts a comment. The standard vocabulary prefixes are predeclared.
/// Throws TemplateError for unknown variables, unregistered functions and
/// syntax errors (row = statement index where known).
TripleTemplate parse_template(std::string_view text, const FunctionRegistry& registry = FunctionRegistry::builtins(),
                              std::span<const std::string_view> fields = record_fields());
TripleTemplate load_template(const std::filesystem::path& file,
                             const FunctionRegistry& registry = FunctionRegistry::builtins());

/// Exactly rows.size() triples in row order. Throws TemplateError naming an
/// unbound variable, or wrapping a function failure with the row index.
std::vector<rdf::Triple> expand(const TripleTemplate& tpl, const Bindings& bindings,
                                const FunctionRegistry& registry = FunctionRegistry::builtins());

std::vector<rdf::Triple> expand(const TripleTemplate& tpl, const DailyReport& report, const Region* region = nullptr,
                                const FunctionRegistry& registry = FunctionRegistry::builtins());

/// `{base}/report/{code}/{yyyy-mm-dd}`.
std::string report_iri(const NutsCode& region, Date day);
std::string region_iri(std::string_view code);

} // namespace covkg::rdfgen
