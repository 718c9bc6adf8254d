#pragma once

#include "covkg/model.hpp"
#include "covkg/store.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

/// Cross-border adjacency and correlation of daily infection series.
namespace covkg::analysis {

/// Regions described in the store (subjects with a nuts:code), with names,
/// geometry, parent and population attributes. Entries that cannot be read
/// are skipped with a warning.
std::vector<Region> regions_from_store(const TripleStore& store);

/// cov:DailyReport resources, sorted by (region, day).
std::vector<DailyReport> reports_from_store(const TripleStore& store);

using RegionPair = std::pair<NutsCode, NutsCode>;

/// Unordered pairs of touching level 2/3 regions in different countries,
/// first < second, sorted. Regions without geometry are skipped.
std::vector<RegionPair> cross_border_pairs(std::span<const Region> regions);
std::vector<RegionPair> cross_border_pairs(const TripleStore& store);

struct AlignedSeries {
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<Date> dates;
};

/// Values of both regions on the days both reported, chronologically.
AlignedSeries align_series(std::span<const DailyReport> reports, const NutsCode& a, const NutsCode& b);

/// Two-pass Pearson coefficient. Throws InsufficientDataError (n < 2),
/// UndefinedCorrelationError (a constant series) or ValidationError (length
/// mismatch).
double pearson(std::span<const double> xs, std::span<const double> ys);

/// Day-over-day differences; a day is kept only if the previous calendar
/// day was reported as well.
std::vector<DailyReport> daily_deltas(std::span<const DailyReport> reports);

struct CorrelationOptions {
    bool delta = false;
    std::size_t min_days = 2;
};

struct CorrelationEntry {
    NutsCode region_a;
    NutsCode region_b;
    double pearson_r = 0.0;
    std::size_t n = 0;
};

/// One entry per cross-border pair with enough aligned days and a defined
/// coefficient, sorted by coefficient descending then by codes.
std::vector<CorrelationEntry> correlation_table(std::span<const Region> regions, std::span<const DailyReport> reports,
                                                const CorrelationOptions& options = {});
std::vector<CorrelationEntry> correlation_table(const TripleStore& store, const CorrelationOptions& options = {});

/// Columns regionA, regionB, pearsonR, n.
std::string to_csv(std::span<const CorrelationEntry> entries);
std::string to_table(std::span<const CorrelationEntry> entries);

} // namespace covkg::analysis
