#include <doctest.h>

#include "covkg/errors.hpp"
#include "covkg/rdfgen.hpp"
#include "fixtures.hpp"

using namespace covkg;
using rdf::Term;

namespace {

const rdfgen::TripleTemplate& shipped() {
    static const auto tpl = rdfgen::load_template(fixture::source_dir() / "data/templates/covid.tpl");
    return tpl;
}

} // namespace

TEST_CASE("shipped template expands one report") {
    const DailyReport r{NutsCode::parse("AT130"), parse_date("2020-04-01"), 9};
    const auto ts = rdfgen::expand(shipped(), r);
    REQUIRE(ts.size() == 6);
    const Term report = Term::iri("http://ai-group.ds.unipi.gr/covid-19/report/AT130/2020-04-01");
    const Term instant = Term::iri("http://ai-group.ds.unipi.gr/covid-19/report/AT130/2020-04-01/time");
    CHECK(ts[0] == rdf::Triple{report, Term::iri(vocab::type), Term::iri(vocab::DailyReport)});
    CHECK(ts[1] == rdf::Triple{report, Term::iri(vocab::hasSpatialFeature), fixture::nuts("AT130")});
    CHECK(ts[2] == rdf::Triple{report, Term::iri(vocab::infected), Term::integer(9)});
    CHECK(ts[3] == rdf::Triple{report, Term::iri(vocab::has_time), instant});
    CHECK(ts[4] == rdf::Triple{instant, Term::iri(vocab::type), Term::iri(vocab::Instant)});
    CHECK(ts[5] == rdf::Triple{instant, Term::iri(vocab::inXSDDateTimeStamp),
                               Term::literal("2020-04-01T00:00:00Z", vocab::xsd_dateTimeStamp)});
    CHECK(rdfgen::report_iri(r.region, r.day) == report.value());
}

TEST_CASE("expansion is deterministic") {
    const DailyReport r{NutsCode::parse("SE110"), parse_date("2020-03-02"), 5};
    CHECK(rdfgen::expand(shipped(), r) == rdfgen::expand(shipped(), r));
}

TEST_CASE("empty template") {
    const auto tpl = rdfgen::parse_template("# nothing here\n");
    CHECK(tpl.rows.empty());
    CHECK(rdfgen::expand(tpl, rdfgen::Bindings{}).empty());
}

TEST_CASE("unknown and unbound variables") {
    try {
        rdfgen::parse_template("?foo cov:infected ?infected .");
        FAIL("expected TemplateError");
    } catch (const TemplateError& e) {
        CHECK(e.name() == "foo");
    }
    const std::string_view fields[] = {"foo"};
    const auto tpl = rdfgen::parse_template("nuts:AT130 rdfs:label xsdString(?foo) .", rdfgen::FunctionRegistry::builtins(), fields);
    try {
        rdfgen::expand(tpl, rdfgen::Bindings{});
        FAIL("expected TemplateError");
    } catch (const TemplateError& e) {
        CHECK(e.name() == "foo");
    }
    rdfgen::Bindings b;
    b.emplace("foo", Term::literal("bar"));
    CHECK(rdfgen::expand(tpl, b)[0].object == Term::literal("bar"));
}

TEST_CASE("template grammar") {
    const auto tpl = rdfgen::parse_template(R"(@prefix ex: <http://example.org/> .
PREFIX ex2: <http://example.org/two/>
ex:a a ex2:T .
ex:a ex:label "Wien"@de .
ex:a ex:n 42 .
ex:a ex:d "1.5"^^xsd:decimal .
regionIri(?region) ex:name ?regionName .
)");
    REQUIRE(tpl.rows.size() == 5);
    Region wien = fixture::region("AT130");
    wien.names = {{"de", "Wien"}};
    const auto ts = rdfgen::expand(tpl, DailyReport{wien.code, parse_date("2020-03-01"), 1}, &wien);
    CHECK(ts[1].object == Term::lang_literal("Wien", "de"));
    CHECK(ts[2].object == Term::integer(42));
    CHECK(ts[3].object == Term::literal("1.5", vocab::xsd_decimal));
    CHECK(ts[4].subject == fixture::nuts("AT130"));
    CHECK(ts[4].object == Term::literal("Wien"));

    CHECK_THROWS_AS(rdfgen::parse_template("nope(?region) a cov:DailyReport ."), TemplateError);
    CHECK_THROWS_AS(rdfgen::parse_template("cov:a cov:b ."), TemplateError);
}

TEST_CASE("function failures name the row") {
    rdfgen::FunctionRegistry reg = rdfgen::FunctionRegistry::builtins();
    reg.add("boom", [](std::span<const Term>) -> Term { throw std::runtime_error("bad input"); });
    const auto tpl = rdfgen::parse_template("cov:a cov:b cov:c .\ncov:a cov:b boom(?day) .", reg);
    try {
        rdfgen::expand(tpl, DailyReport{NutsCode::parse("AT130"), parse_date("2020-03-01"), 1}, nullptr, reg);
        FAIL("expected TemplateError");
    } catch (const TemplateError& e) {
        CHECK(e.row() == 1);
        CHECK(e.name() == "boom");
    }
}
