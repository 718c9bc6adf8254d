#include <doctest.h>

#include "covkg/errors.hpp"
#include "covkg/model.hpp"
#include "covkg/vocab.hpp"

using namespace covkg;

TEST_CASE("parent codes follow the prefix rule") {
    CHECK(parent_code("AT130")->str() == "AT13");
    CHECK_FALSE(parent_code("AT").has_value());
    CHECK(parent_code("DEB3K")->str() == "DEB3");
    CHECK(parent_code("EL3")->str() == "EL");
    CHECK_THROWS_AS(parent_code("A"), ValidationError);
    CHECK_THROWS_AS(parent_code("AT13X9"), ValidationError);
    CHECK_THROWS_AS(parent_code("at130"), ValidationError);
}

TEST_CASE("code levels and ancestors") {
    const auto c = NutsCode::parse("ITC11");
    CHECK(c.level() == 3);
    CHECK(c.country() == "IT");
    CHECK(c.ancestor_at(1)->str() == "ITC");
    CHECK(c.ancestor_at(3)->str() == "ITC11");
    CHECK_FALSE(c.ancestor_at(4).has_value());
    CHECK(NutsCode::is_valid("BE34"));
    CHECK_FALSE(NutsCode::is_valid("B-34"));
    CHECK_FALSE(NutsCode::try_parse("").has_value());
}

TEST_CASE("dates and instants") {
    CHECK(format_date(parse_date("2020-03-01")) == "2020-03-01");
    CHECK_THROWS_AS(parse_date("2020-13-01"), ValidationError);
    CHECK_THROWS_AS(parse_date("2020-02-30"), ValidationError);

    const auto t = parse_instant("2020-04-01T22:00:00+01:00");
    CHECK(format_instant(t) == "2020-04-01T21:00:00Z");
    CHECK(format_instant(parse_instant("2020-04-01")) == "2020-04-01T00:00:00Z");
    CHECK(format_instant(parse_instant("2020-04-01 08:30:00")) == "2020-04-01T08:30:00Z");
    CHECK(format_instant(parse_instant("2020-04-01T08:30:00.250Z")) == "2020-04-01T08:30:00Z");
    CHECK(format_instant(parse_instant("1583020800000")) == "2020-03-01T00:00:00Z");
    CHECK(utc_day(parse_instant("2020-03-01T23:30:00-02:00")) == parse_date("2020-03-02"));
    CHECK_THROWS_AS(parse_instant("yesterday"), ValidationError);
}

TEST_CASE("region invariants") {
    Region r{NutsCode::parse("AT130"), {{"de", "Wien"}, {"en", "Vienna"}}, std::nullopt, NutsCode::parse("AT13"),
             1900000, 4600.0, 400000, 500000, 500000, 500000};
    CHECK(r.label() == "Vienna");
    CHECK_NOTHROW(r.validate());
    r.parent = NutsCode::parse("AT12");
    CHECK_THROWS_AS(r.validate(), ValidationError);
    r.parent.reset();
    r.population_total = -1;
    CHECK_THROWS_AS(r.validate(), ValidationError);
}

TEST_CASE("vocabulary prefixes") {
    CHECK(vocab::expand("cov:infected") == std::string(vocab::infected));
    CHECK(vocab::compact(vocab::infected) == "cov:infected");
    CHECK(vocab::compact(vocab::hasGeometry) == "geosparql:hasGeometry");
    CHECK(vocab::standard_prefixes().at("") == std::string(vocab::kCov));
    CHECK_FALSE(vocab::expand("nope:x").has_value());
}
