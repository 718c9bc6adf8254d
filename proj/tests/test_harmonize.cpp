#include <doctest.h>

#include "covkg/errors.hpp"
#include "covkg/harmonize.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <random>

using namespace covkg;
using namespace covkg::harmonize;
using geo::Geometry;

namespace {

Date day(const char* s) {
    return parse_date(s);
}

MappedRecord rec(const char* code, const char* instant, std::int64_t n) {
    return {NutsCode::parse(code), parse_instant(instant), n};
}

} // namespace

TEST_CASE("key normalization") {
    // decomposed e + combining grave becomes the precomposed form
    CHECK(normalize_key("  Lie\xCC\x80ge\t") == "Li\xC3\xA8ge");
    CHECK(normalize_key("GKZ:101") == "GKZ:101");
}

TEST_CASE("region map table") {
    const auto table = RegionMapTable::parse_csv(
        "# version: 2020-03\nsourceId,rawKey,nutsCode\nAT-src,GKZ:101,AT111\nBE-src,Liège,BE332\nBE-src,Seraing,BE332\n# note\n");
    CHECK(table.version() == "2020-03");
    CHECK(table.size() == 3);
    CHECK(map_region(table, "AT-src", "GKZ:101").str() == "AT111");
    CHECK(map_region(table, "BE-src", "Lie\xCC\x80ge").str() == "BE332");
    CHECK(map_region(table, "BE-src", "Seraing").str() == "BE332");
    try {
        map_region(table, "DE-src", "landkreis:XYZ");
        FAIL("expected UnknownRegionError");
    } catch (const UnknownRegionError& e) {
        CHECK(e.key() == "landkreis:XYZ");
        CHECK(e.source_id() == "DE-src");
    }
    CHECK_THROWS_AS(RegionMapTable::parse_csv("sourceId,rawKey,nutsCode\nA,k,AT111\nA,k,AT112\n"), ValidationError);
    CHECK_NOTHROW(RegionMapTable::parse_csv("sourceId,rawKey,nutsCode\nA,k,AT111\nA,k,AT111\n"));
    CHECK_THROWS_AS(RegionMapTable::parse_csv("sourceId,rawKey,nutsCode\nA,k,not a code\n"), ValidationError);
    CHECK_THROWS_AS(RegionMapTable::parse_csv("source,key,code\n"), ParseError);

    const auto shipped = RegionMapTable::load(fixture::source_dir() / "data/region_map.csv");
    CHECK(shipped.size() > 0);
}

TEST_CASE("nearest region") {
    const std::vector<Region> regions = {
        fixture::region("AA111", Geometry::rectangle(0, 0, 1, 1)),
        fixture::region("AA112", Geometry::rectangle(2, 0, 3, 1)),
        fixture::region("AA113", geo::parse_wkt("POLYGON ((0 2, 3 2, 1.5 4, 0 2))")),
        fixture::region("AA11", Geometry::rectangle(-10, -10, 10, 10)),
    };
    CHECK(assign_nearest_region({0.5, 0.5}, regions).str() == "AA111");
    CHECK(assign_nearest_region({1.5, 0.5}, regions).str() == "AA111"); // equidistant
    CHECK(assign_nearest_region({1.5, 1.6}, regions).str() == oracle::nearest_region({1.5, 1.6}, regions));

    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-3.0, 6.0);
    for (int i = 0; i < 200; ++i) {
        const geo::Point p{u(rng), u(rng)};
        CHECK(assign_nearest_region(p, regions).str() == oracle::nearest_region(p, regions));
    }
    const std::vector<Region> bare = {fixture::region("AA111")};
    CHECK_THROWS_AS(assign_nearest_region({0, 0}, bare), NoGeometryError);
}

TEST_CASE("daily alignment") {
    const std::vector<MappedRecord> hourly = {rec("AT130", "2020-04-01T08:00:00Z", 5), rec("AT130", "2020-04-01T22:00:00Z", 9),
                                              rec("AT130", "2020-04-01T13:00:00Z", 7)};
    const auto out = align_daily(hourly, ingest::Cadence::hourly, day("2020-04-05"));
    REQUIRE(out.size() == 1);
    CHECK(out[0].infected == 9);

    const std::vector<MappedRecord> today = {rec("AT130", "2020-04-05T01:00:00Z", 3), rec("AT130", "2020-04-04T01:00:00Z", 2)};
    const auto kept = align_daily(today, ingest::Cadence::daily, day("2020-04-05"));
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].day == day("2020-04-04"));

    const std::vector<MappedRecord> greek = {rec("EL303", "2020-03-01", 1), rec("EL303", "2020-03-04", 4)};
    const auto sparse = align_daily(greek, ingest::Cadence::irregular, day("2020-03-11"));
    REQUIRE(sparse.size() == 2);
    CHECK(sparse[1].day == day("2020-03-04"));

    const std::vector<MappedRecord> tie = {rec("SE110", "2020-03-02", 1), rec("SE110", "2020-03-02", 2)};
    CHECK(align_daily(tie, ingest::Cadence::daily, day("2020-03-11"))[0].infected == 2);

    // idempotent on its own output
    const auto again = align_daily(as_records(out), ingest::Cadence::daily, day("2020-04-05"));
    CHECK(again == out);
}

TEST_CASE("sub-region aggregation") {
    auto table = RegionMapTable::parse_csv("sourceId,rawKey,nutsCode\nBE-src,Liège,BE332\nBE-src,Seraing,BE332\nBE-src,Huy,BE331\n");
    const std::vector<SubregionReport> same_day = {{"BE-src", "Liège", day("2020-03-02"), 3},
                                                   {"BE-src", "Seraing", day("2020-03-02"), 4},
                                                   {"BE-src", "Liège", day("2020-03-03"), 5},
                                                   {"BE-src", "Huy", day("2020-03-03"), 1}};
    const auto out = aggregate_to_nuts3(same_day, table);
    REQUIRE(out.size() == 3);
    CHECK(out[0] == DailyReport{NutsCode::parse("BE331"), day("2020-03-03"), 1});
    CHECK(out[1] == DailyReport{NutsCode::parse("BE332"), day("2020-03-02"), 7});
    CHECK(out[2] == DailyReport{NutsCode::parse("BE332"), day("2020-03-03"), 5});
    CHECK(aggregate_to_nuts3({}, table).empty());

    const std::vector<SubregionReport> unmapped = {{"BE-src", "Waremme", day("2020-03-02"), 1}};
    CHECK_THROWS_AS(aggregate_to_nuts3(unmapped, table), UnknownRegionError);
    const std::vector<SubregionReport> huge = {{"BE-src", "Liège", day("2020-03-02"), INT64_MAX},
                                               {"BE-src", "Seraing", day("2020-03-02"), 1}};
    CHECK_THROWS_AS(aggregate_to_nuts3(huge, table), AggregationError);
}

TEST_CASE("subregion alignment keeps the latest value per key") {
    const std::vector<SourceRecord> recs = {{"BE-src", " Liège", parse_instant("2020-03-02T08:00:00Z"), 3, {}},
                                            {"BE-src", "Liège", parse_instant("2020-03-02T18:00:00Z"), 4, {}},
                                            {"BE-src", "Liège", parse_instant("2020-03-05T18:00:00Z"), 9, {}}};
    const auto out = align_subregions(recs, day("2020-03-05"));
    REQUIRE(out.size() == 1);
    CHECK(out[0].infected == 4);
    CHECK(out[0].raw_key == "Liège");
}

TEST_CASE("rollup") {
    std::vector<Region> regions;
    for (const char* c : {"IT", "ITC", "ITC1", "ITC11", "ITC16", "FR", "FRF", "FRF3", "FRF31"}) regions.push_back(fixture::region(c));
    const std::vector<DailyReport> reports = {{NutsCode::parse("ITC11"), day("2020-03-01"), 2},
                                              {NutsCode::parse("ITC16"), day("2020-03-01"), 3},
                                              {NutsCode::parse("FRF31"), day("2020-03-01"), 4}};
    for (int level : {2, 1, 0}) {
        const auto out = rollup(reports, regions, level);
        REQUIRE(out.size() == 2);
        CHECK(out[0].region.level() == level);
        CHECK(out[0].infected == 4); // FR sorts first
        CHECK(out[1].infected == 5);
    }
    const std::vector<DailyReport> stray = {{NutsCode::parse("SE110"), day("2020-03-01"), 1}};
    CHECK_THROWS_AS(rollup(stray, regions, 0), RollupError);
    CHECK_THROWS_AS(rollup(reports, regions, 4), RollupError);
}

TEST_CASE("rollup equals a group-by-prefix oracle on random input") {
    std::mt19937 rng(5);
    std::vector<Region> regions;
    std::vector<NutsCode> leaves;
    for (const char* c : {"AT", "AT1", "AT12", "AT121", "AT122", "DE", "DE2", "DE21", "DE212", "DE3", "DE30", "DE300"}) {
        regions.push_back(fixture::region(c));
        if (regions.back().level() == 3) leaves.push_back(regions.back().code);
    }
    std::vector<DailyReport> reports;
    for (const auto& code : leaves) {
        for (int d = 0; d < 5; ++d) reports.push_back({code, day("2020-03-01") + std::chrono::days(d), static_cast<int>(rng() % 1000)});
    }
    for (int level : {2, 1, 0}) {
        const auto expected = oracle::group_by_prefix(reports, level);
        const auto got = rollup(reports, regions, level);
        CHECK(got.size() == expected.size());
        for (const auto& r : got) CHECK(expected.at({r.region.str(), r.day}) == r.infected);
    }
}
