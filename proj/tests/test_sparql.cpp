#include <doctest.h>

#include "covkg/errors.hpp"
#include "covkg/sparql.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <set>

using namespace covkg;
using rdf::Term;

namespace {

const char* kAdjacency = R"(PREFIX geosparql: <http://www.opengis.net/ont/geosparql#>
PREFIX : <http://ai-group.ds.unipi.gr/covid-19#>
PREFIX nuts: <http://nuts.geovocab.org/id/>
PREFIX f: <java:SPARQL_functions.>

SELECT ?r1 ?r2 ?c1 ?wkt WHERE {
   ?r1 nuts:name ?name ; geosparql:hasGeometry/geosparql:asWKT ?wkt . ?c1 :hasPart ?r1 .
   ?r2 nuts:name ?name2 ; geosparql:hasGeometry/geosparql:asWKT ?wkt2 . ?c2 :hasPart ?r2 .
?c1 nuts:level "0" . ?c2 nuts:level "0" .
?r1 nuts:level ?l1 . ?r2 nuts:level ?l2 .
   FILTER(f:touches(?wkt,?wkt2)&&(?c1!=?c2) &&
      ((?l1="2")||(?l1="3")) && ((?l2="2")||(?l2="3")))
}
)";

const char* kCorrelation = R"(SELECT ?r1 ?r2 ?inf1 ?inf2 ?date WHERE {
   ?r1 nuts:name ?name ; geosparql:hasGeometry/geosparql:asWKT ?wkt .
   ?c1 :hasPart ?r1 .
   ?r2 nuts:name ?name2 ; geosparql:hasGeometry/geosparql:asWKT ?wkt2 .
   ?c2 :hasPart ?r2 .
?c1 nuts:level "0" . ?c2 nuts:level "0" .
?r1 nuts:level ?l1 . ?r2 nuts:level ?l2 .
?report1 :hasSpatialFeature ?r1 ; :infected ?inf1 ;
       time:has_time/time:inXSDDateTimeStamp ?date.
   ?report2 :hasSpatialFeature ?r2 ; :infected ?inf2 ;
       time:has_time/time:inXSDDateTimeStamp ?date.
   FILTER(f:touches(?wkt,?wkt2)&&(?c1!=?c2) &&
      ((?l1="2")||(?l1="3"))&& ((?l2="2")||(?l2="3")))
} ORDER BY ?date
)";

sparql::ParseOptions defaults() {
    return {vocab::standard_prefixes()};
}

std::set<std::pair<std::string, std::string>> pairs_of(const sparql::ResultSet& rs) {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& row : rs.rows) out.emplace(row[0].value(), row[1].value());
    return out;
}

} // namespace

TEST_CASE("adjacency listing plan") {
    const auto plan = sparql::parse_query(kAdjacency);
    // two sequence paths of length two each add one pattern
    CHECK(plan.where.patterns.size() == 12);
    CHECK(plan.where.filters.size() == 1);
    CHECK(plan.projection == std::vector<std::string>{"r1", "r2", "c1", "wkt"});
    CHECK(plan.result_variables() == plan.projection);
    const auto helpers = std::count_if(plan.where.patterns.begin(), plan.where.patterns.end(), [](const auto& p) {
        const auto* v = std::get_if<sparql::Var>(&p.object);
        return v && v->name.starts_with(sparql::kPathVarPrefix);
    });
    CHECK(helpers == 2);
}

TEST_CASE("universal scan and select star") {
    const auto plan = sparql::parse_query("SELECT * WHERE { ?s ?p ?o }");
    CHECK(plan.select_all);
    CHECK(plan.where.patterns.size() == 1);
    CHECK(plan.result_variables() == std::vector<std::string>{"s", "p", "o"});

    auto st = fixture::store_of(fixture::query_world(1));
    CHECK(sparql::evaluate(plan, *st).rows.size() == st->size());
}

TEST_CASE("unsupported features are named") {
    const auto feature_of = [](const char* q) {
        try {
            sparql::parse_query(q);
        } catch (const UnsupportedFeatureError& e) {
            return e.feature();
        }
        return std::string("none");
    };
    CHECK(feature_of("SELECT * WHERE { ?s ?p ?o OPTIONAL { ?s ?q ?r } }") == "OPTIONAL");
    CHECK(feature_of("SELECT * WHERE { { ?s ?p ?o } UNION { ?s ?q ?o } }") == "UNION");
    CHECK(feature_of("CONSTRUCT { ?s ?p ?o } WHERE { ?s ?p ?o }") == "CONSTRUCT");
    CHECK(feature_of("SELECT DISTINCT ?s WHERE { ?s ?p ?o }") == "DISTINCT");
}

TEST_CASE("syntax errors carry positions") {
    try {
        sparql::parse_query("SELECT ?s WHERE {\n  ?s ?p \n}");
        FAIL("expected QuerySyntaxError");
    } catch (const QuerySyntaxError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() >= 1);
    }
    CHECK_THROWS_AS(sparql::parse_query("SELECT ?s WHERE { ?s nope:p ?o }"), QuerySyntaxError);
    CHECK_NOTHROW(sparql::parse_query("SELECT ?s WHERE { ?s cov:infected ?o }", defaults()));
}

TEST_CASE("adjacency query finds the cross-border pairs in both orientations") {
    auto st = fixture::store_of(fixture::query_world(1));
    const auto rs = sparql::evaluate(sparql::parse_query(kAdjacency), *st);
    const std::string n(vocab::kNuts);
    const std::set<std::pair<std::string, std::string>> expected = {
        {n + "AT111", n + "ITC11"}, {n + "ITC11", n + "AT111"}, {n + "AT130", n + "DE111"},
        {n + "DE111", n + "AT130"}, {n + "DE111", n + "FRF31"}, {n + "FRF31", n + "DE111"}};
    CHECK(rs.rows.size() == 6);
    CHECK(pairs_of(rs) == expected);
}

TEST_CASE("correlation query orders rows by date") {
    const auto triples = fixture::query_world(10);
    auto st = fixture::store_of(triples);
    const auto plan = sparql::parse_query(kCorrelation, defaults());
    const auto rs = sparql::evaluate(plan, *st);
    CHECK(rs.rows.size() == 60); // 6 oriented pairs x 10 days
    for (std::size_t i = 1; i < rs.rows.size(); ++i) CHECK(rs.rows[i - 1][4].value() <= rs.rows[i][4].value());
    const auto verdict = oracle::compare_results(plan, rs, oracle::brute_force(plan, triples, {}));
    CHECK_MESSAGE(verdict.ok, verdict.detail);
}

TEST_CASE("limit") {
    auto st = fixture::store_of(fixture::query_world(1));
    const auto zero = sparql::evaluate(sparql::parse_query("SELECT ?s ?o WHERE { ?s ?p ?o } LIMIT 0"), *st);
    CHECK(zero.rows.empty());
    CHECK(zero.variables == std::vector<std::string>{"s", "o"});
    CHECK(sparql::evaluate(sparql::parse_query("SELECT * WHERE { ?s ?p ?o } LIMIT 10"), *st).rows.size() == 10);
}

TEST_CASE("filter type errors drop rows") {
    auto st = fixture::store_of(fixture::query_world(1));
    const auto rs = sparql::evaluate(
        sparql::parse_query("SELECT ?r WHERE { ?r nuts:name ?n FILTER(?n > 5) }", defaults()), *st);
    CHECK(rs.rows.empty());
    const auto alt = sparql::evaluate(
        sparql::parse_query("SELECT ?r WHERE { ?r nuts:name ?n FILTER(?n > 5 || ?n = \"AT130\") }", defaults()), *st);
    CHECK(alt.rows.size() == 1);
}

TEST_CASE("unknown functions are rejected at evaluation") {
    auto st = fixture::store_of(fixture::query_world(1));
    const auto plan = sparql::parse_query("SELECT ?r WHERE { ?r nuts:name ?n FILTER(<http://x.org/f>(?n)) }", defaults());
    try {
        sparql::evaluate(plan, *st);
        FAIL("expected UnsupportedFeatureError");
    } catch (const UnsupportedFeatureError& e) {
        CHECK(e.feature().find("http://x.org/f") != std::string::npos);
    }
}

TEST_CASE("touches rejects non-geometry arguments as a type error") {
    auto st = fixture::store_of(fixture::query_world(1));
    const auto plan = sparql::parse_query("SELECT ?r WHERE { ?r nuts:name ?n FILTER(f:touches(?n, ?n)) }", defaults());
    CHECK_THROWS_AS(sparql::evaluate(plan, *st), FilterTypeError);
}

TEST_CASE("join order prefers bound positions") {
    const auto plan = sparql::parse_query(
        "SELECT * WHERE { ?a ?p ?b . ?a nuts:code \"AT130\" . ?a nuts:name ?n }", defaults());
    const auto order = sparql::join_order(plan.where.patterns);
    REQUIRE(order.size() == 3);
    CHECK(order[0] == 1);
}

TEST_CASE("ordering") {
    CHECK(sparql::compare_for_order(Term::integer(2), Term::literal("10", vocab::xsd_integer)) < 0);
    CHECK(sparql::compare_for_order(Term::blank("x"), Term::iri("a:b")) < 0);
    CHECK(sparql::compare_for_order(Term::iri("a:b"), Term::literal("a")) < 0);
    auto st = fixture::store_of(fixture::query_world(3));
    const auto rs = sparql::evaluate(
        sparql::parse_query("SELECT ?x ?i WHERE { ?x cov:infected ?i } ORDER BY DESC(?i) ?x", defaults()), *st);
    for (std::size_t k = 1; k < rs.rows.size(); ++k) {
        CHECK(*sparql::numeric_value(rs.rows[k - 1][1]) >= *sparql::numeric_value(rs.rows[k][1]));
    }
}

TEST_CASE("results formats") {
    sparql::ResultSet rs{{"s", "n"}, {{Term::iri("a:x"), Term::integer(3)}, {Term::blank("b1"), Term::lang_literal("Wien", "de")}}};
    const auto j = sparql::to_json(rs);
    CHECK(j["head"]["vars"] == nlohmann::json::array({"s", "n"}));
    CHECK(j["results"]["bindings"][0]["n"]["datatype"] == std::string(vocab::xsd_integer));
    const auto back = sparql::results_from_json(j);
    CHECK(back.variables == rs.variables);
    CHECK(back.rows == rs.rows);
    CHECK(sparql::to_csv(rs) == "s,n\r\na:x,3\r\n_:b1,Wien\r\n");
}

TEST_CASE("group text is re-parseable") {
    const auto plan = sparql::parse_query(kAdjacency);
    const auto text = sparql::to_select_query(plan.where);
    const auto again = sparql::parse_query(text);
    CHECK(again.where.patterns.size() == plan.where.patterns.size());
    CHECK(again.where.filters.size() == 1);
}
