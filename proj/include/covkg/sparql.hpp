#pragma once

#include "covkg/geo.hpp"
#include "covkg/rdf.hpp"
#include "covkg/store.hpp"
#include "covkg/vocab.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

/// Restricted SPARQL dialect: SELECT over basic graph patterns with sequence
/// paths, FILTER, SERVICE, ORDER BY and LIMIT.
namespace covkg::sparql {

struct Var {
    std::string name;
    friend bool operator==(const Var&, const Var&) = default;
};

using Slot = std::variant<rdf::Term, Var>;

struct TriplePattern {
    Slot subject;
    Slot predicate;
    Slot object;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Op { variable, constant, eq, ne, lt, gt, le, ge, logical_and, logical_or, logical_not, call };

    Op op = Op::constant;
    std::string name;       // variable name or function IRI
    rdf::Term constant;
    std::vector<ExprPtr> args;
};

struct ServiceClause;

struct GroupPattern {
    std::vector<TriplePattern> patterns;
    std::vector<ExprPtr> filters;
    std::vector<ServiceClause> services;
};

struct ServiceClause {
    std::string endpoint;
    GroupPattern group;
};

struct OrderKey {
    std::string variable;
    bool descending = false;
};

struct QueryPlan {
    vocab::PrefixMap prefixes;
    bool select_all = false;
    std::vector<std::string> projection;
    GroupPattern where;
    std::vector<OrderKey> order_by;
    std::optional<std::size_t> limit;

    /// Projected variables, or for `SELECT *` every user variable in order of
    /// first appearance (path helper variables excluded).
    std::vector<std::string> result_variables() const;
};

/// Prefix of the helper variables introduced by sequence path desugaring.
inline constexpr std::string_view kPathVarPrefix = "__path";

struct ParseOptions {
    /// Consulted for prefixes the query does not declare itself.
    vocab::PrefixMap default_prefixes;
};

/// Throws QuerySyntaxError (with line/column) or UnsupportedFeatureError.
QueryPlan parse_query(std::string_view text, const ParseOptions& options = {});

/// Variables mentioned by a pattern group (patterns, filters, nested services).
std::vector<std::string> variables_of(const GroupPattern& group);
std::vector<std::string> variables_of(const Expr& expr);

/// Variables a group can bind: those in triple patterns, including nested
/// services. Filter-only variables are excluded.
std::vector<std::string> bindable_variables(const GroupPattern& group);

/// Self-contained `SELECT * WHERE { ... }` text for a group.
std::string to_select_query(const GroupPattern& group);

std::string slot_text(const Slot& slot);
std::string expr_text(const Expr& expr);

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

struct ResultSet {
    std::vector<std::string> variables;
    std::vector<std::vector<rdf::Term>> rows;

    std::optional<std::size_t> column(std::string_view variable) const;
};

/// SPARQL 1.1 query results JSON document.
nlohmann::json to_json(const ResultSet& results);
ResultSet results_from_json(const nlohmann::json& doc);

/// SPARQL 1.1 query results CSV (CRLF line endings).
std::string to_csv(const ResultSet& results);

/// Total order used by ORDER BY: blank < IRI < literal; numeric literals
/// compare by value, other literals by lexical form then datatype.
int compare_for_order(const rdf::Term& a, const rdf::Term& b);

std::optional<double> numeric_value(const rdf::Term& t);

// ---------------------------------------------------------------------------
// Filter functions
// ---------------------------------------------------------------------------

/// Per-query evaluation services offered to filter functions.
class FunctionContext {
public:
    /// Geometry of a WKT literal, parsed once per query. Throws
    /// FilterTypeError for non-literals or unparseable lexical forms.
    const geo::Geometry& geometry(const rdf::Term& term);

private:
    std::unordered_map<std::string, std::shared_ptr<const geo::Geometry>> geometries_;
};

using FilterFunction = std::function<rdf::Term(std::span<const rdf::Term>, FunctionContext&)>;

class FunctionRegistry {
public:
    void add(std::string iri, FilterFunction fn);
    const FilterFunction* find(std::string_view iri) const;

    /// Registry with `touches` under f:touches and geof:sfTouches.
    static FunctionRegistry with_defaults();

private:
    std::map<std::string, FilterFunction, std::less<>> functions_;
};

// ---------------------------------------------------------------------------
// Federation
// ---------------------------------------------------------------------------

/// Executes a SELECT query at a remote endpoint. Implementations throw
/// ServiceError on any failure.
class ServiceClient {
public:
    virtual ~ServiceClient() = default;
    virtual ResultSet select(const std::string& endpoint, const std::string& query) = 0;
};

/// Substitutes outer bindings into the group, sends one request per distinct
/// substitution and joins the responses back onto the outer rows.
ResultSet federate(const std::string& endpoint, const GroupPattern& group, const ResultSet& outer,
                   ServiceClient& client);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct EvalOptions {
    const FunctionRegistry* functions = nullptr; // defaults when null
    ServiceClient* services = nullptr;           // SERVICE fails without one
};

/// Bag-semantics evaluation against one store snapshot.
ResultSet evaluate(const QueryPlan& plan, const TripleStore& store, const EvalOptions& options = {});

/// Order in which `evaluate` joins the local patterns of a group: greedily
/// the pattern with most bound positions, ties by original position.
std::vector<std::size_t> join_order(const std::vector<TriplePattern>& patterns);

} // namespace covkg::sparql
