#include <doctest.h>

#include "covkg/errors.hpp"
#include "covkg/rdf.hpp"
#include "fixtures.hpp"

#include <algorithm>

using namespace covkg;
using rdf::Term;
using rdf::Triple;

namespace {

std::vector<Triple> sorted(std::vector<Triple> v) {
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace

TEST_CASE("n-triples statements") {
    const Triple t{fixture::nuts("AT130"), fixture::iri(vocab::code), Term::literal("AT130")};
    const auto doc = rdf::serialize(std::span(&t, 1), rdf::Format::ntriples);
    CHECK(doc == "<http://nuts.geovocab.org/id/AT130> <http://nuts.geovocab.org/id/code> \"AT130\" .\n");
    CHECK(rdf::serialize({}, rdf::Format::ntriples).empty());
    CHECK(rdf::serialize({}, rdf::Format::turtle).starts_with("@prefix"));
}

TEST_CASE("term forms") {
    CHECK(rdf::to_ntriples(Term::integer(9)) == "\"9\"^^<http://www.w3.org/2001/XMLSchema#integer>");
    CHECK(rdf::to_ntriples(Term::lang_literal("Wien", "de")) == "\"Wien\"@de");
    CHECK(rdf::to_ntriples(Term::blank("b0")) == "_:b0");
    CHECK(rdf::to_ntriples(Term::literal("a\"b\\c\nd")) == "\"a\\\"b\\\\c\\nd\"");
    CHECK(Term::lang_literal("x", "de").datatype() == vocab::langString);
}

TEST_CASE("round trips in both formats") {
    const auto triples = fixture::random_triples(100, 11);
    for (auto format : {rdf::Format::ntriples, rdf::Format::turtle}) {
        const auto back = rdf::parse(rdf::serialize(triples, format), format);
        CHECK(sorted(back) == sorted(triples));
    }
}

TEST_CASE("turtle syntax") {
    const auto doc = R"(@prefix ex: <http://example.org/> .
@base <http://example.org/base/> .
ex:a a ex:T ; ex:p 1, 2.5, true, "x"@en ;
  ex:q [ ex:r "inner" ] .
<rel> ex:p """long
string""" .
ex:b ex:p "typed"^^ex:dt .
)";
    const auto ts = rdf::parse(doc, rdf::Format::turtle);
    CHECK(ts.size() == 9);
    const auto has = [&](const Term& o) {
        return std::any_of(ts.begin(), ts.end(), [&](const Triple& t) { return t.object == o; });
    };
    CHECK(has(Term::integer(1)));
    CHECK(has(Term::literal("2.5", vocab::xsd_decimal)));
    CHECK(has(Term::literal("true", vocab::xsd_boolean)));
    CHECK(has(Term::lang_literal("x", "en")));
    CHECK(has(Term::literal("long\nstring")));
    CHECK(has(Term::literal("typed", "http://example.org/dt")));
    CHECK(std::any_of(ts.begin(), ts.end(), [](const Triple& t) { return t.subject == Term::iri("http://example.org/base/rel"); }));
}

TEST_CASE("parse errors carry the line") {
    const std::string doc = "<a:x> <a:p> <a:o> .\n<a:x> <a:p> \"unterminated .\n";
    try {
        rdf::parse(doc, rdf::Format::ntriples);
        FAIL("expected LoadError");
    } catch (const LoadError& e) {
        CHECK(e.line() == 2);
    }
    CHECK(rdf::parse_format("ttl") == rdf::Format::turtle);
    CHECK_THROWS_AS(rdf::parse_format("xml"), ValidationError);
}

TEST_CASE("unicode escapes decode") {
    const auto ts = rdf::parse("<a:s> <a:p> \"Li\\u00E8ge \\U0001F600\" .\n", rdf::Format::ntriples);
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].object.value() == "Liège \xF0\x9F\x98\x80");
}
