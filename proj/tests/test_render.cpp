#include <doctest.h>

#include "covkg/errors.hpp"
#include "covkg/service.hpp"
#include "fixtures.hpp"

#include <cmath>

#include <fmt/format.h>

using namespace covkg;
using namespace covkg::service;
using rdf::Term;

namespace {

Term wkt(int i) {
    return Term::literal(fmt::format("POLYGON (({0} 0, {1} 0, {1} 1, {0} 1, {0} 0))", i, i + 1), vocab::wktLiteral);
}

// Linear interpolation of the green and blue channels from 255 to 0.
std::string expected_color(double t) {
    const int gb = static_cast<int>(std::lround(255.0 * (1.0 - t)));
    return fmt::format("#FF{:02X}{:02X}", gb, gb);
}

sparql::ResultSet numeric_rows(std::vector<std::int64_t> values) {
    sparql::ResultSet rs{{"r", "wkt", "inf"}, {}};
    int i = 0;
    for (auto v : values) {
        rs.rows.push_back({fixture::nuts(fmt::format("AT1{:02}", i)), wkt(i), Term::integer(v)});
        ++i;
    }
    return rs;
}

} // namespace

TEST_CASE("white-red scale") {
    const auto fc = render_geojson(numeric_rows({0, 5, 10}), {"inf", std::nullopt});
    REQUIRE(fc["features"].size() == 3);
    CHECK(fc["features"][0]["properties"]["fillColor"] == "#FFFFFF");
    CHECK(fc["features"][1]["properties"]["fillColor"] == "#FF8080");
    CHECK(fc["features"][2]["properties"]["fillColor"] == "#FF0000");
    CHECK(fc["legend"]["min"] == 0);
    CHECK(fc["legend"]["max"] == 10);
    CHECK(fc["features"][0]["geometry"]["type"] == "Polygon");
    CHECK(fc["features"][0]["properties"]["r"] == "http://nuts.geovocab.org/id/AT100");
    CHECK_FALSE(fc["features"][0]["properties"].contains("wkt"));

    for (double t : {0.0, 0.1, 0.25, 0.5, 0.77, 1.0}) CHECK(white_red(t) == expected_color(t));
}

TEST_CASE("degenerate range is white") {
    const auto fc = render_geojson(numeric_rows({4, 4, 4}), {"inf", ColorScale::numeric_white_red});
    for (const auto& f : fc["features"]) CHECK(f["properties"]["fillColor"] == "#FFFFFF");
}

TEST_CASE("categorical colors are stable") {
    sparql::ResultSet rs{{"c", "wkt"}, {{fixture::nuts("AT"), wkt(0)}, {fixture::nuts("DE"), wkt(1)}, {fixture::nuts("AT"), wkt(2)}}};
    const auto fc = render_geojson(rs, {"c", std::nullopt});
    CHECK(fc["features"][0]["properties"]["fillColor"] == fc["features"][2]["properties"]["fillColor"]);
    CHECK(categorical_color("AT") == categorical_color("AT"));
    CHECK_FALSE(fc.contains("legend"));
    CHECK(parse_color_scale("categoricalDeterministic") == ColorScale::categorical);
    CHECK_THROWS(parse_color_scale("rainbow"));
}

TEST_CASE("render errors") {
    sparql::ResultSet no_geometry{{"r", "inf"}, {{fixture::nuts("AT130"), Term::integer(1)}}};
    CHECK_THROWS_AS(render_geojson(no_geometry, {"inf", std::nullopt}), RenderError);
    CHECK_THROWS_AS(render_geojson(numeric_rows({1}), {"missing", std::nullopt}), RenderError);
    sparql::ResultSet words{{"wkt", "n"}, {{wkt(0), Term::literal("many")}}};
    CHECK_THROWS_AS(render_geojson(words, {"n", ColorScale::numeric_white_red}), RenderError);
    const auto empty = render_geojson(sparql::ResultSet{{"wkt", "n"}, {}}, {"n", std::nullopt});
    CHECK(empty["features"].empty());
}

TEST_CASE("regions feature collection") {
    auto st = fixture::store_of(fixture::query_world(1));
    const auto fc = regions_geojson(*st);
    CHECK(fc["type"] == "FeatureCollection");
    CHECK(fc["features"].size() == 6);
}
