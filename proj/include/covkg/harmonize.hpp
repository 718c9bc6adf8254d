#pragma once

#include "covkg/geo.hpp"
#include "covkg/ingest.hpp"
#include "covkg/model.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

/// SourceRecords to DailyReports: region mapping, day alignment,
/// sub-region aggregation and hierarchy roll-up.
namespace covkg::harmonize {

/// NFC normalization followed by trimming of surrounding white space.
std::string normalize_key(std::string_view raw);

/// (sourceId, raw key) -> NUTS code. Many keys may share a code.
class RegionMapTable {
public:
    /// CSV with header `sourceId,rawKey,nutsCode`. Lines starting with '#'
    /// are comments; `# version: X` records the table version. Throws
    /// ParseError for structural problems and ValidationError for bad codes
    /// or a key mapped to two different codes.
    static RegionMapTable parse_csv(std::string_view text);
    static RegionMapTable load(const std::filesystem::path& file);

    void add(std::string_view source_id, std::string_view raw_key, const NutsCode& code);
    std::optional<NutsCode> find(std::string_view source_id, std::string_view raw_key) const;

    std::size_t size() const noexcept { return entries_.size(); }
    const std::string& version() const noexcept { return version_; }

private:
    std::map<std::pair<std::string, std::string>, NutsCode> entries_;
    std::string version_;
};

/// Throws UnknownRegionError when the key has no mapping.
NutsCode map_region(const RegionMapTable& table, std::string_view source_id, std::string_view raw_key);

/// Level-3 region closest to the point (0 when inside); ties go to the
/// lexicographically smallest code. Throws NoGeometryError.
NutsCode assign_nearest_region(geo::Point point, std::span<const Region> regions);

/// A record whose region has been resolved.
struct MappedRecord {
    NutsCode region;
    Instant timestamp;
    std::int64_t infected = 0;
};

std::vector<MappedRecord> as_records(std::span<const DailyReport> reports);

/// Buckets by (region, UTC day); the latest timestamp in a bucket wins (on
/// equal timestamps the later input record). Days >= today are dropped and
/// gaps are kept. Output sorted by (region, day).
std::vector<DailyReport> align_daily(std::span<const MappedRecord> records, ingest::Cadence cadence, Date today);

/// A day-aligned value for a sub-region still identified by its raw key.
struct SubregionReport {
    std::string source_id;
    std::string raw_key;
    Date day;
    std::int64_t infected = 0;
};

/// align_daily for records keyed by raw (normalized) key.
std::vector<SubregionReport> align_subregions(std::span<const SourceRecord> records, Date today);

/// Sums sub-regions into their mapped region per day. Throws
/// UnknownRegionError for unmapped keys and AggregationError on overflow.
std::vector<DailyReport> aggregate_to_nuts3(std::span<const SubregionReport> reports, const RegionMapTable& table);

/// Sums reports per (ancestor at target level, day). Ancestors are followed
/// through the supplied hierarchy. Throws RollupError when a report's region
/// is unknown or has no ancestor at `target_level`.
std::vector<DailyReport> rollup(std::span<const DailyReport> reports, std::span<const Region> regions, int target_level);

} // namespace covkg::harmonize
