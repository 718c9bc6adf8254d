#pragma once

#include "covkg/geo.hpp"

#include <chrono>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace covkg {

/// A syntactically valid NUTS code: two-letter country prefix followed by up
/// to three alphanumerics, one per hierarchy level.
class NutsCode {
public:
    /// Throws ValidationError on malformed input.
    static NutsCode parse(std::string_view text);
    static std::optional<NutsCode> try_parse(std::string_view text) noexcept;
    static bool is_valid(std::string_view text) noexcept;

    const std::string& str() const noexcept { return text_; }
    int level() const noexcept { return static_cast<int>(text_.size()) - 2; }
    std::string_view country() const noexcept { return std::string_view(text_).substr(0, 2); }

    std::optional<NutsCode> parent() const;

    /// Ancestor (or the code itself) at `level`; absent when `level` is deeper.
    std::optional<NutsCode> ancestor_at(int level) const;

    friend auto operator<=>(const NutsCode&, const NutsCode&) = default;
    friend bool operator==(const NutsCode&, const NutsCode&) = default;

private:
    explicit NutsCode(std::string text) : text_(std::move(text)) {}
    std::string text_;
};

/// Parent of a code given as text; ValidationError for malformed codes.
std::optional<NutsCode> parent_code(std::string_view code);
std::optional<NutsCode> parent_code(const NutsCode& code);

using Date = std::chrono::sys_days;
using Instant = std::chrono::sys_seconds;

/// YYYY-MM-DD. Throws ValidationError.
Date parse_date(std::string_view text);
std::string format_date(Date d);

/// Accepts a bare date, ISO-8601 date-times with `T` or space separator, an
/// optional fractional part, `Z` or a +hh:mm offset (no zone means UTC), and
/// integral epoch milliseconds (ArcGIS feature-server style).
Instant parse_instant(std::string_view text);
std::string format_instant(Instant t);

inline Date utc_day(Instant t) {
    return std::chrono::floor<std::chrono::days>(t);
}

struct Region {
    NutsCode code;
    std::map<std::string, std::string> names; // language tag -> label
    std::optional<geo::Geometry> geometry;
    std::optional<NutsCode> parent;
    std::optional<std::int64_t> population_total;
    std::optional<double> population_per_sq_km;
    std::optional<std::int64_t> pop_le19;
    std::optional<std::int64_t> pop_20_39;
    std::optional<std::int64_t> pop_40_59;
    std::optional<std::int64_t> pop_ge60;

    int level() const noexcept { return code.level(); }

    /// English label if present, else the first label, else the code.
    std::string label() const;

    /// Throws ValidationError when an invariant is broken.
    void validate() const;
};

/// One raw observation from a connector, before harmonization.
struct SourceRecord {
    std::string source_id;
    std::string raw_region_key;
    Instant timestamp;
    std::int64_t infected = 0;
    std::map<std::string, std::string> extra;

    friend bool operator==(const SourceRecord&, const SourceRecord&) = default;
};

/// Harmonized observation. `infected` is stored exactly as reported.
struct DailyReport {
    NutsCode region;
    Date day;
    std::int64_t infected = 0;

    friend auto operator<=>(const DailyReport&, const DailyReport&) = default;
    friend bool operator==(const DailyReport&, const DailyReport&) = default;
};

} // namespace covkg
