#include "covkg/sparql.hpp"

#include "covkg/errors.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include <fmt/format.h>

namespace covkg::sparql {

// ---------------------------------------------------------------------------
// Functions
// ---------------------------------------------------------------------------

const geo::Geometry& FunctionContext::geometry(const rdf::Term& term) {
    if (!term.is_literal() || (term.datatype() != vocab::wktLiteral && term.datatype() != vocab::xsd_string)) {
        throw FilterTypeError(fmt::format("expected a WKT literal, got {}", rdf::to_ntriples(term)));
    }
    auto it = geometries_.find(term.value());
    if (it != geometries_.end()) return *it->second;
    try {
        auto g = std::make_shared<const geo::Geometry>(geo::parse_wkt(term.value()));
        return *geometries_.emplace(term.value(), std::move(g)).first->second;
    } catch (const Error& e) {
        throw FilterTypeError(fmt::format("literal is not valid WKT: {}", e.what()));
    }
}

void FunctionRegistry::add(std::string iri, FilterFunction fn) {
    functions_[std::move(iri)] = std::move(fn);
}

const FilterFunction* FunctionRegistry::find(std::string_view iri) const {
    auto it = functions_.find(iri);
    return it == functions_.end() ? nullptr : &it->second;
}

FunctionRegistry FunctionRegistry::with_defaults() {
    FunctionRegistry registry;
    FilterFunction touches = [](std::span<const rdf::Term> args, FunctionContext& ctx) {
        if (args.size() != 2) throw FilterTypeError("touches expects two geometry arguments");
        const auto& a = ctx.geometry(args[0]);
        const auto& b = ctx.geometry(args[1]);
        try {
            return rdf::Term::literal(geo::touches(a, b) ? "true" : "false", vocab::xsd_boolean);
        } catch (const PredicateDomainError& e) {
            throw FilterTypeError(e.what());
        }
    };
    registry.add(std::string(vocab::touches_function), touches);
    registry.add("http://www.opengis.net/def/function/geosparql/sfTouches", touches);
    return registry;
}

namespace {

using Id = TripleStore::Id;
using Row = std::vector<Id>;
constexpr Id kUnbound = std::numeric_limits<Id>::max();

/// Store dictionary plus terms that only exist in this query (constants
/// absent from the store, federated results).
class TermTable {
public:
    explicit TermTable(const TripleStore& store) : store_(store), base_(store.term_count()) {}

    Id intern(const rdf::Term& t) {
        if (auto id = store_.find_id(t)) return *id;
        auto [it, inserted] = extra_ids_.try_emplace(t, static_cast<Id>(base_ + extra_.size()));
        if (inserted) extra_.push_back(t);
        return it->second;
    }

    const rdf::Term& term(Id id) const { return id < base_ ? store_.term(id) : extra_[id - base_]; }

private:
    const TripleStore& store_;
    std::size_t base_;
    std::vector<rdf::Term> extra_;
    std::unordered_map<rdf::Term, Id, TermHash> extra_ids_;
};

rdf::Term boolean(bool v) {
    return rdf::Term::literal(v ? "true" : "false", vocab::xsd_boolean);
}

/// Effective boolean value; nullopt is a type error.
std::optional<bool> ebv(const rdf::Term& t) {
    if (!t.is_literal()) return std::nullopt;
    if (t.datatype() == vocab::xsd_boolean) return t.value() == "true" || t.value() == "1";
    if (auto n = numeric_value(t)) return *n != 0.0;
    if (t.datatype() == vocab::xsd_string || t.datatype() == vocab::langString) return !t.value().empty();
    return std::nullopt;
}

bool lexically_ordered_type(std::string_view dt) {
    return dt == vocab::xsd_string || dt == vocab::xsd_dateTime || dt == vocab::xsd_dateTimeStamp ||
           dt == "http://www.w3.org/2001/XMLSchema#date";
}

std::optional<bool> equal_terms(const rdf::Term& a, const rdf::Term& b) {
    if (a.is_literal() && b.is_literal()) {
        const auto na = numeric_value(a);
        const auto nb = numeric_value(b);
        if (na && nb) return *na == *nb;
    }
    return a == b;
}

std::optional<int> order_terms(const rdf::Term& a, const rdf::Term& b) {
    if (!a.is_literal() || !b.is_literal()) return std::nullopt;
    const auto na = numeric_value(a);
    const auto nb = numeric_value(b);
    if (na && nb) return *na < *nb ? -1 : (*nb < *na ? 1 : 0);
    if (a.datatype() == b.datatype() && a.lang() == b.lang() &&
        (lexically_ordered_type(a.datatype()) || a.datatype() == vocab::xsd_boolean)) {
        return a.value().compare(b.value()) < 0 ? -1 : (a.value() == b.value() ? 0 : 1);
    }
    return std::nullopt;
}

class ExprEvaluator {
public:
    ExprEvaluator(const FunctionRegistry& functions, FunctionContext& ctx) : functions_(functions), ctx_(ctx) {}

    /// nullopt signals an expression error (the row is filtered out).
    template <class Lookup>
    std::optional<rdf::Term> eval(const Expr& e, const Lookup& lookup) {
        using Op = Expr::Op;
        switch (e.op) {
        case Op::variable: return lookup(e.name);
        case Op::constant: return e.constant;
        case Op::logical_and:
        case Op::logical_or: {
            const auto l = truth(*e.args[0], lookup);
            const auto r = truth(*e.args[1], lookup);
            if (e.op == Op::logical_and) {
                if ((l && !*l) || (r && !*r)) return boolean(false);
                if (l && r) return boolean(true);
                return std::nullopt;
            }
            if ((l && *l) || (r && *r)) return boolean(true);
            if (l && r) return boolean(false);
            return std::nullopt;
        }
        case Op::logical_not: {
            const auto v = truth(*e.args[0], lookup);
            if (!v) return std::nullopt;
            return boolean(!*v);
        }
        case Op::eq:
        case Op::ne: {
            const auto l = eval(*e.args[0], lookup);
            const auto r = eval(*e.args[1], lookup);
            if (!l || !r) return std::nullopt;
            const auto eq = equal_terms(*l, *r);
            if (!eq) return std::nullopt;
            return boolean(e.op == Op::eq ? *eq : !*eq);
        }
        case Op::lt:
        case Op::gt:
        case Op::le:
        case Op::ge: {
            const auto l = eval(*e.args[0], lookup);
            const auto r = eval(*e.args[1], lookup);
            if (!l || !r) return std::nullopt;
            const auto c = order_terms(*l, *r);
            if (!c) return std::nullopt;
            switch (e.op) {
            case Op::lt: return boolean(*c < 0);
            case Op::gt: return boolean(*c > 0);
            case Op::le: return boolean(*c <= 0);
            default: return boolean(*c >= 0);
            }
        }
        case Op::call: {
            const FilterFunction* fn = functions_.find(e.name);
            if (!fn) throw UnsupportedFeatureError(fmt::format("function <{}>", e.name));
            std::vector<rdf::Term> args;
            for (const auto& a : e.args) {
                auto v = eval(*a, lookup);
                if (!v) return std::nullopt;
                args.push_back(std::move(*v));
            }
            return (*fn)(args, ctx_);
        }
        }
        return std::nullopt;
    }

    template <class Lookup>
    std::optional<bool> truth(const Expr& e, const Lookup& lookup) {
        auto v = eval(e, lookup);
        if (!v) return std::nullopt;
        return ebv(*v);
    }

private:
    const FunctionRegistry& functions_;
    FunctionContext& ctx_;
};

void check_functions(const GroupPattern& g, const FunctionRegistry& functions) {
    std::vector<const Expr*> stack;
    for (const auto& f : g.filters) stack.push_back(f.get());
    while (!stack.empty()) {
        const Expr* e = stack.back();
        stack.pop_back();
        if (e->op == Expr::Op::call && !functions.find(e->name)) {
            throw UnsupportedFeatureError(fmt::format("function <{}>", e->name));
        }
        for (const auto& a : e->args) stack.push_back(a.get());
    }
}

ExprPtr substitute(const ExprPtr& e, const std::map<std::string, rdf::Term>& bindings) {
    if (e->op == Expr::Op::variable) {
        auto it = bindings.find(e->name);
        if (it == bindings.end()) return e;
        auto c = std::make_shared<Expr>();
        c->op = Expr::Op::constant;
        c->constant = it->second;
        return c;
    }
    if (e->args.empty()) return e;
    auto copy = std::make_shared<Expr>(*e);
    for (auto& a : copy->args) a = substitute(a, bindings);
    return copy;
}

Slot substitute(const Slot& s, const std::map<std::string, rdf::Term>& bindings) {
    if (auto v = std::get_if<Var>(&s)) {
        auto it = bindings.find(v->name);
        if (it != bindings.end()) return it->second;
    }
    return s;
}

GroupPattern substitute(const GroupPattern& g, const std::map<std::string, rdf::Term>& bindings) {
    GroupPattern out;
    for (const auto& p : g.patterns) {
        out.patterns.push_back({substitute(p.subject, bindings), substitute(p.predicate, bindings),
                                substitute(p.object, bindings)});
    }
    for (const auto& f : g.filters) out.filters.push_back(substitute(f, bindings));
    for (const auto& s : g.services) out.services.push_back({s.endpoint, substitute(s.group, bindings)});
    return out;
}

class GroupEvaluator {
public:
    GroupEvaluator(const TripleStore& store, const EvalOptions& options, const FunctionRegistry& functions)
        : store_(store), table_(store), options_(options), functions_(functions), exprs_(functions, ctx_) {}

    /// Rows over `vars_` (unbound entries allowed until the end).
    std::vector<Row> run(const GroupPattern& g) {
        check_functions(g, functions_);
        for (const auto& v : variables_of(g)) index_of(v);

        std::vector<Row> rows{Row(vars_.size(), kUnbound)};
        std::vector<bool> done(g.filters.size(), false);
        std::set<std::size_t> bound;

        auto apply_ready_filters = [&](bool final_pass) {
            for (std::size_t i = 0; i < g.filters.size(); ++i) {
                if (done[i]) continue;
                const auto fv = variables_of(*g.filters[i]);
                const bool ready = std::all_of(fv.begin(), fv.end(), [&](const std::string& v) {
                    return bound.count(index_of(v)) > 0;
                });
                if (!ready && !final_pass) continue;
                done[i] = true;
                std::erase_if(rows, [&](const Row& r) { return !keep(*g.filters[i], r); });
            }
        };

        apply_ready_filters(false);
        for (std::size_t idx : join_order(g.patterns)) {
            const auto& pattern = g.patterns[idx];
            rows = extend(rows, pattern);
            for (const Slot* s : {&pattern.subject, &pattern.predicate, &pattern.object}) {
                if (auto v = std::get_if<Var>(s)) bound.insert(index_of(v->name));
            }
            apply_ready_filters(false);
        }
        for (const auto& service : g.services) {
            if (!options_.services) throw ServiceError(service.endpoint, "no service client configured");
            rows = join_service(rows, service, bound);
            for (const auto& v : bindable_variables(service.group)) bound.insert(index_of(v));
            apply_ready_filters(false);
        }
        apply_ready_filters(true);
        return rows;
    }

    std::size_t index_of(const std::string& name) {
        auto it = std::find(vars_.begin(), vars_.end(), name);
        if (it != vars_.end()) return static_cast<std::size_t>(it - vars_.begin());
        vars_.push_back(name);
        return vars_.size() - 1;
    }

    const rdf::Term& term(Id id) const { return table_.term(id); }

private:
    bool keep(const Expr& filter, const Row& row) {
        auto lookup = [&](const std::string& name) -> std::optional<rdf::Term> {
            auto it = std::find(vars_.begin(), vars_.end(), name);
            if (it == vars_.end()) return std::nullopt;
            const Id id = row[static_cast<std::size_t>(it - vars_.begin())];
            if (id == kUnbound) return std::nullopt;
            return table_.term(id);
        };
        const auto v = exprs_.truth(filter, lookup);
        return v && *v;
    }

    std::vector<Row> extend(const std::vector<Row>& rows, const TriplePattern& pattern) {
        struct Position {
            std::optional<Id> constant;
            std::optional<std::size_t> var;
        };
        auto compile = [&](const Slot& s) {
            Position p;
            if (auto v = std::get_if<Var>(&s)) {
                p.var = index_of(v->name);
            } else {
                p.constant = table_.intern(std::get<rdf::Term>(s));
            }
            return p;
        };
        const Position pos[3] = {compile(pattern.subject), compile(pattern.predicate), compile(pattern.object)};

        std::vector<Row> out;
        for (const Row& row : rows) {
            std::optional<Id> probe[3];
            for (int i = 0; i < 3; ++i) {
                if (pos[i].constant) {
                    probe[i] = pos[i].constant;
                } else if (row[*pos[i].var] != kUnbound) {
                    probe[i] = row[*pos[i].var];
                }
            }
            store_.scan(probe[0], probe[1], probe[2], [&](Id s, Id p, Id o) {
                Row next = row;
                const Id got[3] = {s, p, o};
                for (int i = 0; i < 3; ++i) {
                    if (!pos[i].var) continue;
                    Id& slot = next[*pos[i].var];
                    if (slot == kUnbound) {
                        slot = got[i];
                    } else if (slot != got[i]) {
                        return; // same variable twice in one pattern
                    }
                }
                out.push_back(std::move(next));
            });
        }
        return out;
    }

    std::vector<Row> join_service(const std::vector<Row>& rows, const ServiceClause& service,
                                  const std::set<std::size_t>& bound) {
        ResultSet outer;
        std::vector<std::size_t> cols(bound.begin(), bound.end());
        for (std::size_t c : cols) outer.variables.push_back(vars_[c]);
        for (const Row& r : rows) {
            std::vector<rdf::Term> terms;
            for (std::size_t c : cols) terms.push_back(table_.term(r[c]));
            outer.rows.push_back(std::move(terms));
        }
        const ResultSet joined = federate(service.endpoint, service.group, outer, *options_.services);

        std::vector<std::size_t> target;
        for (const auto& v : joined.variables) target.push_back(index_of(v));
        std::vector<Row> out;
        out.reserve(joined.rows.size());
        for (const auto& jr : joined.rows) {
            Row r(vars_.size(), kUnbound);
            for (std::size_t i = 0; i < jr.size(); ++i) r[target[i]] = table_.intern(jr[i]);
            out.push_back(std::move(r));
        }
        return out;
    }

    const TripleStore& store_;
    TermTable table_;
    const EvalOptions& options_;
    const FunctionRegistry& functions_;
    FunctionContext ctx_;
    ExprEvaluator exprs_;
    std::vector<std::string> vars_;
};

} // namespace

std::vector<std::size_t> join_order(const std::vector<TriplePattern>& patterns) {
    std::vector<std::size_t> order;
    std::vector<bool> used(patterns.size(), false);
    std::set<std::string> bound;
    auto bound_count = [&](const TriplePattern& p) {
        int n = 0;
        for (const Slot* s : {&p.subject, &p.predicate, &p.object}) {
            if (auto v = std::get_if<Var>(s)) {
                n += bound.count(v->name) ? 1 : 0;
            } else {
                ++n;
            }
        }
        return n;
    };
    for (std::size_t step = 0; step < patterns.size(); ++step) {
        std::size_t best = patterns.size();
        int best_count = -1;
        for (std::size_t i = 0; i < patterns.size(); ++i) {
            if (used[i]) continue;
            const int c = bound_count(patterns[i]);
            if (c > best_count) {
                best = i;
                best_count = c;
            }
        }
        used[best] = true;
        order.push_back(best);
        for (const Slot* s : {&patterns[best].subject, &patterns[best].predicate, &patterns[best].object}) {
            if (auto v = std::get_if<Var>(s)) bound.insert(v->name);
        }
    }
    return order;
}

ResultSet federate(const std::string& endpoint, const GroupPattern& group, const ResultSet& outer,
                   ServiceClient& client) {
    const auto group_vars = variables_of(group);
    const auto bindable = bindable_variables(group);
    std::vector<std::size_t> shared_cols;
    for (std::size_t i = 0; i < outer.variables.size(); ++i) {
        if (std::find(group_vars.begin(), group_vars.end(), outer.variables[i]) != group_vars.end()) {
            shared_cols.push_back(i);
        }
    }

    ResultSet out;
    out.variables = outer.variables;
    std::vector<std::string> added;
    for (const auto& v : bindable) {
        if (std::find(outer.variables.begin(), outer.variables.end(), v) == outer.variables.end()) {
            added.push_back(v);
            out.variables.push_back(v);
        }
    }

    std::map<std::string, ResultSet> cache;
    for (const auto& row : outer.rows) {
        std::map<std::string, rdf::Term> bindings;
        for (std::size_t c : shared_cols) bindings.emplace(outer.variables[c], row[c]);
        const std::string query = to_select_query(substitute(group, bindings));

        auto it = cache.find(query);
        if (it == cache.end()) it = cache.emplace(query, client.select(endpoint, query)).first;
        const ResultSet& remote = it->second;

        std::vector<std::optional<std::size_t>> cols;
        for (const auto& v : added) {
            const auto c = remote.column(v);
            if (!c) throw ServiceError(endpoint, fmt::format("response does not bind ?{}", v));
            cols.push_back(c);
        }
        for (const auto& rr : remote.rows) {
            std::vector<rdf::Term> joined = row;
            for (const auto& c : cols) joined.push_back(rr[*c]);
            out.rows.push_back(std::move(joined));
        }
    }
    return out;
}

ResultSet evaluate(const QueryPlan& plan, const TripleStore& store, const EvalOptions& options) {
    static const FunctionRegistry kDefaults = FunctionRegistry::with_defaults();
    const FunctionRegistry& functions = options.functions ? *options.functions : kDefaults;

    GroupEvaluator group(store, options, functions);
    std::vector<Row> rows = group.run(plan.where);

    ResultSet out;
    out.variables = plan.result_variables();
    if (!plan.order_by.empty()) {
        std::vector<std::pair<std::size_t, bool>> keys;
        for (const auto& k : plan.order_by) keys.emplace_back(group.index_of(k.variable), k.descending);
        std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
            for (const auto& [col, desc] : keys) {
                if (a[col] == b[col]) continue;
                if (a[col] == kUnbound || b[col] == kUnbound) return (a[col] == kUnbound) != desc;
                const int c = compare_for_order(group.term(a[col]), group.term(b[col]));
                if (c != 0) return desc ? c > 0 : c < 0;
            }
            return false;
        });
    }
    if (plan.limit && rows.size() > *plan.limit) rows.resize(*plan.limit);

    std::vector<std::size_t> cols;
    for (const auto& v : out.variables) cols.push_back(group.index_of(v));
    out.rows.reserve(rows.size());
    for (const Row& r : rows) {
        std::vector<rdf::Term> projected;
        projected.reserve(cols.size());
        for (std::size_t c : cols) {
            if (c >= r.size() || r[c] == kUnbound) {
                throw Error(fmt::format("variable ?{} is unbound in a result row", out.variables[projected.size()]));
            }
            projected.push_back(group.term(r[c]));
        }
        out.rows.push_back(std::move(projected));
    }
    return out;
}

} // namespace covkg::sparql
