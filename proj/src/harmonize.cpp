#include "covkg/harmonize.hpp"

#include "covkg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

namespace covkg::harmonize {

std::string normalize_key(std::string_view raw) {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw Error(std::string("ICU NFC normalizer unavailable: ") + u_errorName(status));
    icu::UnicodeString in = icu::UnicodeString::fromUTF8(icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
    icu::UnicodeString out = nfc->normalize(in, status);
    if (U_FAILURE(status)) throw ValidationError(std::string("cannot normalize key: ") + u_errorName(status));
    out.trim();
    std::string utf8;
    out.toUTF8String(utf8);
    return utf8;
}

RegionMapTable RegionMapTable::parse_csv(std::string_view text) {
    RegionMapTable table;
    std::string body;
    std::size_t line_no = 0;
    std::size_t header_line = 0;
    // Comments are stripped first so that the CSV reader only sees data.
    std::istringstream lines{std::string(text)};
    std::vector<std::size_t> line_numbers;
    for (std::string line; std::getline(lines, line);) {
        ++line_no;
        std::string_view v = line;
        if (v.starts_with("#")) {
            v.remove_prefix(1);
            while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
            if (v.starts_with("version:")) {
                v.remove_prefix(8);
                table.version_ = normalize_key(v);
            }
            continue;
        }
        if (normalize_key(v).empty()) continue;
        if (!header_line) header_line = line_no;
        body += line;
        body += '\n';
        line_numbers.push_back(line_no);
    }

    const auto rows = ingest::read_csv(body);
    if (rows.empty()) return table;
    const auto& header = rows.front();
    if (header.size() != 3 || normalize_key(header[0]) != "sourceId" || normalize_key(header[1]) != "rawKey" ||
        normalize_key(header[2]) != "nutsCode") {
        throw ParseError(fmt::format("line {}", header_line), "expected header sourceId,rawKey,nutsCode");
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const std::size_t at = r < line_numbers.size() ? line_numbers[r] : line_no;
        if (rows[r].size() != 3) throw ParseError(fmt::format("line {}", at), "expected three columns");
        try {
            table.add(rows[r][0], rows[r][1], NutsCode::parse(normalize_key(rows[r][2])));
        } catch (const ValidationError& e) {
            throw ValidationError(fmt::format("region map line {}: {}", at, e.what()));
        }
    }
    return table;
}

RegionMapTable RegionMapTable::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot open region map " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

void RegionMapTable::add(std::string_view source_id, std::string_view raw_key, const NutsCode& code) {
    auto key = std::make_pair(normalize_key(source_id), normalize_key(raw_key));
    auto [it, inserted] = entries_.try_emplace(key, code);
    if (!inserted && it->second != code) {
        throw ValidationError(fmt::format("key '{}' of source '{}' maps to both {} and {}", key.second, key.first,
                                          it->second.str(), code.str()));
    }
}

std::optional<NutsCode> RegionMapTable::find(std::string_view source_id, std::string_view raw_key) const {
    auto it = entries_.find(std::make_pair(normalize_key(source_id), normalize_key(raw_key)));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

NutsCode map_region(const RegionMapTable& table, std::string_view source_id, std::string_view raw_key) {
    if (auto code = table.find(source_id, raw_key)) return *code;
    throw UnknownRegionError(std::string(source_id), std::string(raw_key));
}

NutsCode assign_nearest_region(geo::Point point, std::span<const Region> regions) {
    if (!std::isfinite(point.x) || !std::isfinite(point.y)) throw ValidationError("point coordinates must be finite");
    constexpr double kTieEps = 1e-9;
    const Region* best = nullptr;
    double best_d = 0.0;
    for (const auto& r : regions) {
        if (r.level() != 3 || !r.geometry) continue;
        const double d = geo::distance(point, *r.geometry);
        if (!best || d < best_d - kTieEps || (std::abs(d - best_d) <= kTieEps && r.code < best->code)) {
            best = &r;
            best_d = d;
        }
    }
    if (!best) throw NoGeometryError("no level-3 region with geometry to assign a point to");
    return best->code;
}

std::vector<MappedRecord> as_records(std::span<const DailyReport> reports) {
    std::vector<MappedRecord> out;
    out.reserve(reports.size());
    for (const auto& r : reports) out.push_back({r.region, Instant(r.day), r.infected});
    return out;
}

std::vector<DailyReport> align_daily(std::span<const MappedRecord> records, ingest::Cadence, Date today) {
    // Cadence does not change the rule: hourly feeds collapse to their last
    // reading of the day and irregular feeds simply leave gaps.
    std::map<std::pair<NutsCode, Date>, const MappedRecord*> latest;
    for (const auto& rec : records) {
        const Date day = utc_day(rec.timestamp);
        if (day >= today) continue;
        auto [it, inserted] = latest.try_emplace({rec.region, day}, &rec);
        if (!inserted && rec.timestamp >= it->second->timestamp) it->second = &rec;
    }
    std::vector<DailyReport> out;
    out.reserve(latest.size());
    for (const auto& [key, rec] : latest) out.push_back({key.first, key.second, rec->infected});
    return out;
}

std::vector<SubregionReport> align_subregions(std::span<const SourceRecord> records, Date today) {
    std::map<std::tuple<std::string, std::string, Date>, const SourceRecord*> latest;
    for (const auto& rec : records) {
        const Date day = utc_day(rec.timestamp);
        if (day >= today) continue;
        auto [it, inserted] = latest.try_emplace({rec.source_id, normalize_key(rec.raw_region_key), day}, &rec);
        if (!inserted && rec.timestamp >= it->second->timestamp) it->second = &rec;
    }
    std::vector<SubregionReport> out;
    out.reserve(latest.size());
    for (const auto& [key, rec] : latest) {
        out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), rec->infected});
    }
    return out;
}

std::vector<DailyReport> aggregate_to_nuts3(std::span<const SubregionReport> reports, const RegionMapTable& table) {
    std::map<std::pair<NutsCode, Date>, std::int64_t> sums;
    for (const auto& r : reports) {
        const NutsCode code = map_region(table, r.source_id, r.raw_key);
        std::int64_t& total = sums.try_emplace({code, r.day}, 0).first->second;
        if (__builtin_add_overflow(total, r.infected, &total)) {
            throw AggregationError(fmt::format("sum for {} on {} overflows", code.str(), format_date(r.day)));
        }
    }
    std::vector<DailyReport> out;
    out.reserve(sums.size());
    for (const auto& [key, total] : sums) out.push_back({key.first, key.second, total});
    return out;
}

std::vector<DailyReport> rollup(std::span<const DailyReport> reports, std::span<const Region> regions, int target_level) {
    if (target_level < 0 || target_level > 2) throw RollupError("target level must be 0, 1 or 2");
    std::map<NutsCode, const Region*> by_code;
    for (const auto& r : regions) by_code.emplace(r.code, &r);

    std::map<NutsCode, NutsCode> ancestor_cache;
    auto ancestor = [&](const NutsCode& code) -> NutsCode {
        if (auto it = ancestor_cache.find(code); it != ancestor_cache.end()) return it->second;
        if (!by_code.count(code)) throw RollupError("region " + code.str() + " is not in the hierarchy");
        if (code.level() < target_level) {
            throw RollupError(fmt::format("region {} has no ancestor at level {}", code.str(), target_level));
        }
        NutsCode cur = code;
        while (cur.level() > target_level) {
            const Region* r = by_code.at(cur);
            std::optional<NutsCode> next = r->parent ? r->parent : cur.parent();
            if (!next || !by_code.count(*next)) {
                throw RollupError(fmt::format("region {} has no ancestor at level {}", code.str(), target_level));
            }
            cur = *next;
        }
        ancestor_cache.emplace(code, cur);
        return cur;
    };

    std::map<std::pair<NutsCode, Date>, std::int64_t> sums;
    for (const auto& rep : reports) {
        std::int64_t& total = sums.try_emplace({ancestor(rep.region), rep.day}, 0).first->second;
        if (__builtin_add_overflow(total, rep.infected, &total)) throw RollupError("roll-up sum overflows");
    }
    std::vector<DailyReport> out;
    out.reserve(sums.size());
    for (const auto& [key, total] : sums) out.push_back({key.first, key.second, total});
    return out;
}

} // namespace covkg::harmonize
