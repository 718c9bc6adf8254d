#include "covkg/analysis.hpp"

#include "covkg/errors.hpp"
#include "covkg/vocab.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <spdlog/spdlog.h>

namespace covkg::analysis {

namespace {

using rdf::Term;

std::optional<Term> object_of(const TripleStore& store, const Term& s, std::string_view p) {
    auto ts = store.match(s, Term::iri(p), std::nullopt);
    if (ts.empty()) return std::nullopt;
    return ts.front().object;
}

template <class T>
std::optional<T> number_of(const std::optional<Term>& t) {
    if (!t || !t->is_literal()) return std::nullopt;
    T v{};
    const std::string& s = t->value();
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<NutsCode> code_of_region(const TripleStore& store, const Term& region) {
    if (auto c = object_of(store, region, vocab::code); c && c->is_literal()) return NutsCode::try_parse(c->value());
    if (region.is_iri() && region.value().starts_with(vocab::kNuts)) {
        return NutsCode::try_parse(std::string_view(region.value()).substr(vocab::kNuts.size()));
    }
    return std::nullopt;
}

} // namespace

std::vector<Region> regions_from_store(const TripleStore& store) {
    std::map<NutsCode, Region> out;
    for (const auto& t : store.match(std::nullopt, Term::iri(vocab::code), std::nullopt)) {
        if (!t.object.is_literal()) continue;
        auto code = NutsCode::try_parse(t.object.value());
        if (!code) {
            spdlog::warn("skipping region {} with malformed code '{}'", t.subject.value(), t.object.value());
            continue;
        }
        if (out.count(*code)) continue;
        Region r{*code, {}, std::nullopt, std::nullopt, {}, {}, {}, {}, {}, {}};
        const Term& s = t.subject;

        for (const auto& n : store.match(s, Term::iri(vocab::name), std::nullopt)) {
            if (n.object.is_literal()) r.names.emplace(n.object.lang(), n.object.value());
        }
        for (const auto& g : store.match(s, Term::iri(vocab::hasGeometry), std::nullopt)) {
            auto wkt = object_of(store, g.object, vocab::asWKT);
            if (!wkt || !wkt->is_literal()) continue;
            try {
                r.geometry = geo::parse_wkt(wkt->value());
                break;
            } catch (const Error& e) {
                spdlog::warn("region {}: unusable geometry: {}", code->str(), e.what());
            }
        }
        for (const auto& h : store.match(std::nullopt, Term::iri(vocab::hasPart), s)) {
            auto parent = code_of_region(store, h.subject);
            if (parent && parent->level() == code->level() - 1) {
                r.parent = parent;
                break;
            }
        }
        r.population_total = number_of<std::int64_t>(object_of(store, s, vocab::hasTotalPopulation));
        r.population_per_sq_km = number_of<double>(object_of(store, s, vocab::PopulationPerSQKm));
        r.pop_le19 = number_of<std::int64_t>(object_of(store, s, vocab::populationGrpLE19));
        r.pop_20_39 = number_of<std::int64_t>(object_of(store, s, vocab::populationGrp20_39));
        r.pop_40_59 = number_of<std::int64_t>(object_of(store, s, vocab::populationGrp40_59));
        r.pop_ge60 = number_of<std::int64_t>(object_of(store, s, vocab::populationGrpGE60));
        out.emplace(*code, std::move(r));
    }
    std::vector<Region> regions;
    regions.reserve(out.size());
    for (auto& [code, r] : out) regions.push_back(std::move(r));
    return regions;
}

std::vector<DailyReport> reports_from_store(const TripleStore& store) {
    std::map<std::pair<NutsCode, Date>, std::int64_t> out;
    for (const auto& t : store.match(std::nullopt, Term::iri(vocab::type), Term::iri(vocab::DailyReport))) {
        const Term& report = t.subject;
        const auto region = object_of(store, report, vocab::hasSpatialFeature);
        const auto infected = number_of<std::int64_t>(object_of(store, report, vocab::infected));
        const auto instant = object_of(store, report, vocab::has_time);
        const auto stamp = instant ? object_of(store, *instant, vocab::inXSDDateTimeStamp) : std::nullopt;
        const auto code = region ? code_of_region(store, *region) : std::nullopt;
        if (!code || !infected || !stamp || stamp->value().size() < 10) {
            spdlog::warn("skipping incomplete report {}", report.value());
            continue;
        }
        Date day;
        try {
            day = parse_date(std::string_view(stamp->value()).substr(0, 10));
        } catch (const ValidationError&) {
            spdlog::warn("skipping report {} with bad timestamp '{}'", report.value(), stamp->value());
            continue;
        }
        if (!out.emplace(std::make_pair(*code, day), *infected).second) {
            spdlog::warn("duplicate report for {} on {}; keeping the first", code->str(), format_date(day));
        }
    }
    std::vector<DailyReport> reports;
    reports.reserve(out.size());
    for (const auto& [key, v] : out) reports.push_back({key.first, key.second, v});
    return reports;
}

std::vector<RegionPair> cross_border_pairs(std::span<const Region> regions) {
    std::vector<const Region*> candidates;
    std::vector<std::string> skipped;
    for (const auto& r : regions) {
        if (r.level() != 2 && r.level() != 3) continue;
        if (!r.geometry) {
            skipped.push_back(r.code.str());
            continue;
        }
        candidates.push_back(&r);
    }
    if (!skipped.empty()) {
        spdlog::warn("{} region(s) without geometry left out of adjacency: {}", skipped.size(),
                     fmt::join(skipped, " "));
    }
    std::vector<RegionPair> out;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        for (std::size_t j = i + 1; j < candidates.size(); ++j) {
            const Region& a = *candidates[i];
            const Region& b = *candidates[j];
            if (a.code.country() == b.code.country()) continue;
            if (a.geometry->is_point() && b.geometry->is_point()) continue;
            if (!geo::touches(*a.geometry, *b.geometry)) continue;
            out.emplace_back(std::min(a.code, b.code), std::max(a.code, b.code));
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<RegionPair> cross_border_pairs(const TripleStore& store) {
    const auto regions = regions_from_store(store);
    return cross_border_pairs(regions);
}

AlignedSeries align_series(std::span<const DailyReport> reports, const NutsCode& a, const NutsCode& b) {
    std::map<Date, std::int64_t> va;
    std::map<Date, std::int64_t> vb;
    for (const auto& r : reports) {
        if (r.region == a) va[r.day] = r.infected;
        if (r.region == b) vb[r.day] = r.infected;
    }
    AlignedSeries out;
    for (const auto& [day, x] : va) {
        auto it = vb.find(day);
        if (it == vb.end()) continue;
        out.xs.push_back(static_cast<double>(x));
        out.ys.push_back(static_cast<double>(it->second));
        out.dates.push_back(day);
    }
    return out;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw ValidationError("series lengths differ");
    const std::size_t n = xs.size();
    if (n < 2) throw InsufficientDataError(fmt::format("need at least 2 aligned values, got {}", n));

    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelationError("a series has zero variance");
    return sxy / std::sqrt(sxx * syy);
}

std::vector<DailyReport> daily_deltas(std::span<const DailyReport> reports) {
    std::map<std::pair<NutsCode, Date>, std::int64_t> by_key;
    for (const auto& r : reports) by_key.insert_or_assign({r.region, r.day}, r.infected);
    std::vector<DailyReport> out;
    for (const auto& [key, v] : by_key) {
        auto prev = by_key.find({key.first, key.second - std::chrono::days(1)});
        if (prev == by_key.end()) continue;
        out.push_back({key.first, key.second, v - prev->second});
    }
    return out;
}

std::vector<CorrelationEntry> correlation_table(std::span<const Region> regions, std::span<const DailyReport> reports,
                                                const CorrelationOptions& options) {
    std::vector<DailyReport> deltas;
    if (options.delta) {
        deltas = daily_deltas(reports);
        reports = deltas;
    }
    const std::size_t min_days = std::max<std::size_t>(2, options.min_days);
    std::vector<CorrelationEntry> out;
    for (const auto& [a, b] : cross_border_pairs(regions)) {
        const auto series = align_series(reports, a, b);
        if (series.dates.size() < min_days) continue;
        try {
            out.push_back({a, b, pearson(series.xs, series.ys), series.dates.size()});
        } catch (const UndefinedCorrelationError&) {
            spdlog::info("correlation of {} and {} is undefined (constant series)", a.str(), b.str());
        }
    }
    std::sort(out.begin(), out.end(), [](const CorrelationEntry& x, const CorrelationEntry& y) {
        if (x.pearson_r != y.pearson_r) return x.pearson_r > y.pearson_r;
        if (x.region_a != y.region_a) return x.region_a < y.region_a;
        return x.region_b < y.region_b;
    });
    return out;
}

std::vector<CorrelationEntry> correlation_table(const TripleStore& store, const CorrelationOptions& options) {
    const auto regions = regions_from_store(store);
    const auto reports = reports_from_store(store);
    return correlation_table(regions, reports, options);
}

std::string to_csv(std::span<const CorrelationEntry> entries) {
    std::string out = "regionA,regionB,pearsonR,n\n";
    for (const auto& e : entries) {
        out += fmt::format("{},{},{},{}\n", e.region_a.str(), e.region_b.str(), e.pearson_r, e.n);
    }
    return out;
}

std::string to_table(std::span<const CorrelationEntry> entries) {
    std::string out = fmt::format("{:<8} {:<8} {:>8} {:>5}\n", "regionA", "regionB", "r", "n");
    for (const auto& e : entries) {
        out += fmt::format("{:<8} {:<8} {:>8.4f} {:>5}\n", e.region_a.str(), e.region_b.str(), e.pearson_r, e.n);
    }
    return out;
}

} // namespace covkg::analysis
