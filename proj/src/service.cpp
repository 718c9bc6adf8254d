#include "covkg/service.hpp"

#include "covkg/analysis.hpp"
#include "covkg/errors.hpp"
#include "covkg/harmonize.hpp"
#include "covkg/rdfgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace covkg::service {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

ColorScale parse_color_scale(std::string_view s) {
    if (s == "numericWhiteRed") return ColorScale::numeric_white_red;
    if (s == "categoricalDeterministic") return ColorScale::categorical;
    throw RenderError(fmt::format("unknown color scale '{}'", s));
}

std::string white_red(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const auto gb = static_cast<int>(std::lround(255.0 * (1.0 - t)));
    return fmt::format("#FF{:02X}{:02X}", gb, gb);
}

std::string categorical_color(std::string_view label) {
    // Qualitative palette; index picked by 32-bit FNV-1a of the label bytes.
    static constexpr std::array<std::string_view, 12> kPalette{
        "#1F77B4", "#FF7F0E", "#2CA02C", "#D62728", "#9467BD", "#8C564B",
        "#E377C2", "#7F7F7F", "#BCBD22", "#17BECF", "#393B79", "#637939"};
    std::uint32_t h = 2166136261u;
    for (unsigned char c : label) {
        h ^= c;
        h *= 16777619u;
    }
    return std::string(kPalette[h % kPalette.size()]);
}

namespace {

std::optional<geo::Geometry> wkt_geometry(const rdf::Term& t) {
    if (!t.is_literal()) return std::nullopt;
    if (t.datatype() != vocab::wktLiteral && t.datatype() != vocab::xsd_string) return std::nullopt;
    try {
        return geo::parse_wkt(t.value());
    } catch (const Error&) {
        return std::nullopt;
    }
}

} // namespace

nlohmann::json render_geojson(const sparql::ResultSet& results, const RenderSpec& spec) {
    const auto color_col = results.column(spec.color_variable);
    if (!color_col) throw RenderError(fmt::format("color variable ?{} is not in the results", spec.color_variable));

    nlohmann::json collection{{"type", "FeatureCollection"}, {"features", nlohmann::json::array()}};
    if (results.rows.empty()) return collection;

    std::optional<std::size_t> geom_col;
    std::vector<geo::Geometry> geometries;
    for (std::size_t c = 0; c < results.variables.size() && !geom_col; ++c) {
        std::vector<geo::Geometry> parsed;
        for (const auto& row : results.rows) {
            auto g = wkt_geometry(row[c]);
            if (!g) break;
            parsed.push_back(std::move(*g));
        }
        if (parsed.size() == results.rows.size()) {
            geom_col = c;
            geometries = std::move(parsed);
        }
    }
    if (!geom_col) throw RenderError("no result variable binds WKT geometries");

    std::vector<std::optional<double>> numbers;
    bool all_numeric = true;
    for (const auto& row : results.rows) {
        numbers.push_back(sparql::numeric_value(row[*color_col]));
        all_numeric = all_numeric && numbers.back().has_value();
    }
    const ColorScale scale = spec.scale.value_or(all_numeric ? ColorScale::numeric_white_red : ColorScale::categorical);
    if (scale == ColorScale::numeric_white_red && !all_numeric) {
        throw RenderError(fmt::format("?{} has non-numeric values", spec.color_variable));
    }

    double lo = 0.0;
    double hi = 0.0;
    if (scale == ColorScale::numeric_white_red) {
        lo = hi = *numbers.front();
        for (const auto& v : numbers) {
            lo = std::min(lo, *v);
            hi = std::max(hi, *v);
        }
    }

    for (std::size_t r = 0; r < results.rows.size(); ++r) {
        const auto& row = results.rows[r];
        nlohmann::json props = nlohmann::json::object();
        for (std::size_t c = 0; c < results.variables.size(); ++c) {
            if (c != *geom_col) props[results.variables[c]] = row[c].value();
        }
        if (scale == ColorScale::numeric_white_red) {
            props["fillColor"] = hi > lo ? white_red((*numbers[r] - lo) / (hi - lo)) : white_red(0.0);
        } else {
            props["fillColor"] = categorical_color(row[*color_col].value());
        }
        collection["features"].push_back(
            {{"type", "Feature"}, {"geometry", geo::to_geojson(geometries[r])}, {"properties", std::move(props)}});
    }
    if (scale == ColorScale::numeric_white_red) collection["legend"] = {{"min", lo}, {"max", hi}};
    return collection;
}

nlohmann::json regions_geojson(const TripleStore& store) {
    nlohmann::json collection{{"type", "FeatureCollection"}, {"features", nlohmann::json::array()}};
    for (const auto& r : analysis::regions_from_store(store)) {
        if (!r.geometry) continue;
        nlohmann::json props{{"code", r.code.str()}, {"name", r.label()}, {"level", r.level()}};
        collection["features"].push_back(
            {{"type", "Feature"}, {"geometry", geo::to_geojson(*r.geometry)}, {"properties", std::move(props)}});
    }
    return collection;
}

// ---------------------------------------------------------------------------
// Deployment
// ---------------------------------------------------------------------------

std::chrono::minutes parse_time_of_day(std::string_view text) {
    int h = 0;
    int m = 0;
    if (text.size() != 5 || text[2] != ':' || std::sscanf(std::string(text).c_str(), "%2d:%2d", &h, &m) != 2 || h < 0 ||
        h > 23 || m < 0 || m > 59) {
        throw ConfigError(fmt::format("time of day must be HH:MM, got '{}'", text));
    }
    return std::chrono::hours(h) + std::chrono::minutes(m);
}

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + p.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

void parse_bind(std::string_view bind, DeploymentConfig& cfg) {
    const auto colon = bind.rfind(':');
    if (colon == std::string_view::npos || colon == 0) throw ConfigError(fmt::format("bind must be host:port, got '{}'", bind));
    cfg.bind_host = std::string(bind.substr(0, colon));
    try {
        cfg.bind_port = std::stoi(std::string(bind.substr(colon + 1)));
    } catch (const std::exception&) {
        throw ConfigError(fmt::format("bad port in bind '{}'", bind));
    }
}

} // namespace

DeploymentConfig load_deployment(const fs::path& file) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(file));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("deployment config is not valid JSON: ") + e.what());
    }
    const fs::path base = file.parent_path();
    auto path_of = [&](const std::string& p) { return p.empty() ? fs::path{} : (base / p).lexically_normal(); };

    DeploymentConfig cfg;
    try {
        cfg.sources = ingest::load_source_configs(path_of(doc.at("sources").get<std::string>()));
        cfg.region_map = path_of(doc.at("regionMap").get<std::string>());
        cfg.template_path = path_of(doc.at("template").get<std::string>());
        for (const auto& p : doc.value("baseData", nlohmann::json::array())) cfg.base_data.push_back(path_of(p.get<std::string>()));
        cfg.snapshot = path_of(doc.value("snapshot", ""));
        cfg.rejects_dir = path_of(doc.value("rejectsDir", ""));
        if (doc.contains("bind")) parse_bind(doc.at("bind").get<std::string>(), cfg);
        if (doc.contains("scheduleUtc")) cfg.schedule_utc = parse_time_of_day(doc.at("scheduleUtc").get<std::string>());
        if (doc.contains("serviceTimeoutMs")) {
            cfg.service_timeout = std::chrono::milliseconds(doc.at("serviceTimeoutMs").get<std::int64_t>());
        }
        if (doc.contains("endpointRewrites")) {
            cfg.endpoint_rewrites = doc.at("endpointRewrites").get<std::map<std::string, std::string>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("deployment config: ") + e.what());
    }
    if (const char* bind = std::getenv("COVKG_BIND"); bind && *bind) parse_bind(bind, cfg);
    if (const char* snap = std::getenv("COVKG_SNAPSHOT"); snap && *snap) cfg.snapshot = snap;
    return cfg;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

nlohmann::json PipelineReport::to_json() const {
    nlohmann::json sources_json = nlohmann::json::array();
    for (const auto& s : sources) {
        nlohmann::json j{{"source", s.source_id},
                         {"ok", s.ok},
                         {"documents", s.documents},
                         {"parsed", s.parsed},
                         {"rejected", s.rejected},
                         {"reports", s.reports},
                         {"triples", s.triples}};
        if (!s.ok) j["error"] = s.error;
        sources_json.push_back(std::move(j));
    }
    return {{"sources", std::move(sources_json)},
            {"succeeded", succeeded},
            {"snapshotTriples", snapshot_triples},
            {"newTriples", new_triples}};
}

void write_atomically(const fs::path& file, const std::string& content) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    const fs::path tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        if (!out) throw Error("write failed for " + tmp.string());
    }
    fs::rename(tmp, file);
}

std::shared_ptr<const TripleStore> load_snapshot(const fs::path& file) {
    auto store = std::make_shared<TripleStore>();
    store->load(read_file(file), rdf::Format::ntriples);
    return store;
}

namespace {

struct SourceOutcome {
    std::vector<DailyReport> reports;
    std::vector<ingest::Reject> rejects;
};

SourceOutcome process_source(const ingest::SourceConfig& src, Date today, const harmonize::RegionMapTable& table,
                             std::span<const Region> regions, SourceReport& report) {
    SourceOutcome out;
    const auto docs = ingest::fetch_documents(src, today);
    report.documents = docs.size();

    std::vector<SourceRecord> records;
    for (const auto& doc : docs) {
        const std::string text = ingest::decode(doc.bytes, src.encoding);
        auto parsed = ingest::parse(src, text);
        for (auto& r : parsed.rejects) {
            if (docs.size() > 1) r.location = doc.location + ": " + r.location;
            out.rejects.push_back(std::move(r));
        }
        std::move(parsed.records.begin(), parsed.records.end(), std::back_inserter(records));
    }
    report.parsed = records.size();

    auto reject_record = [&](const SourceRecord& rec, std::string reason) {
        out.rejects.push_back({src.source_id, "record at " + format_instant(rec.timestamp), std::move(reason), rec.raw_region_key});
    };

    if (src.aggregate) {
        std::vector<SourceRecord> mapped;
        for (const auto& rec : records) {
            if (table.find(src.source_id, rec.raw_region_key)) {
                mapped.push_back(rec);
            } else {
                reject_record(rec, UnknownRegionError(src.source_id, rec.raw_region_key).what());
            }
        }
        const auto subregions = harmonize::align_subregions(mapped, today);
        out.reports = harmonize::aggregate_to_nuts3(subregions, table);
    } else {
        std::vector<harmonize::MappedRecord> mapped;
        for (const auto& rec : records) {
            if (auto code = table.find(src.source_id, rec.raw_region_key)) {
                mapped.push_back({*code, rec.timestamp, rec.infected});
                continue;
            }
            auto lon = rec.extra.find("lon");
            auto lat = rec.extra.find("lat");
            if (lon != rec.extra.end() && lat != rec.extra.end()) {
                try {
                    const geo::Point p{std::stod(lon->second), std::stod(lat->second)};
                    mapped.push_back({harmonize::assign_nearest_region(p, regions), rec.timestamp, rec.infected});
                    continue;
                } catch (const std::exception& e) {
                    reject_record(rec, std::string("nearest-region fallback failed: ") + e.what());
                    continue;
                }
            }
            reject_record(rec, UnknownRegionError(src.source_id, rec.raw_region_key).what());
        }
        out.reports = harmonize::align_daily(mapped, src.cadence, today);
    }
    report.rejected = out.rejects.size();
    report.reports = out.reports.size();
    return out;
}

std::string rejects_jsonl(std::span<const ingest::Reject> rejects) {
    std::string out;
    for (const auto& r : rejects) {
        out += nlohmann::json{{"source", r.source_id}, {"location", r.location}, {"reason", r.reason}, {"raw", r.raw}}
                   .dump();
        out += '\n';
    }
    return out;
}

} // namespace

PipelineReport run_pipeline(const DeploymentConfig& config, Date today, SnapshotHolder& holder) {
    auto store = std::make_shared<TripleStore>();
    for (const auto& path : config.base_data) {
        const auto format = path.extension() == ".nt" ? rdf::Format::ntriples : rdf::Format::turtle;
        try {
            store->load(read_file(path), format);
        } catch (const LoadError& e) {
            throw ConfigError(fmt::format("base data {}: {}", path.string(), e.what()));
        }
    }
    const auto regions = analysis::regions_from_store(*store);
    std::map<NutsCode, const Region*> region_index;
    for (const auto& r : regions) region_index.emplace(r.code, &r);

    const auto table = harmonize::RegionMapTable::load(config.region_map);
    const auto tpl = rdfgen::load_template(config.template_path);

    PipelineReport report;
    std::map<std::pair<NutsCode, Date>, std::string> owner;
    for (const auto& src : config.sources) {
        SourceReport sr;
        sr.source_id = src.source_id;
        try {
            const auto outcome = process_source(src, today, table, regions, sr);
            std::size_t triples = 0;
            for (const auto& rep : outcome.reports) {
                auto [it, fresh] = owner.try_emplace({rep.region, rep.day}, src.source_id);
                if (!fresh) {
                    spdlog::warn("{}: {} on {} already reported by {}; ignored", src.source_id, rep.region.str(),
                                 format_date(rep.day), it->second);
                    continue;
                }
                auto region = region_index.find(rep.region);
                for (auto& t : rdfgen::expand(tpl, rep, region == region_index.end() ? nullptr : region->second)) {
                    store->insert(t);
                    ++triples;
                }
            }
            sr.triples = triples;
            sr.ok = true;
            ++report.succeeded;
            if (!config.rejects_dir.empty()) {
                write_atomically(config.rejects_dir / (src.source_id + ".jsonl"), rejects_jsonl(outcome.rejects));
            }
            spdlog::info("{}: {} document(s), {} record(s), {} reject(s), {} report(s)", src.source_id, sr.documents,
                         sr.parsed, sr.rejected, sr.reports);
        } catch (const Error& e) {
            sr.ok = false;
            sr.error = fmt::format("{}: {}", e.kind(), e.what());
            spdlog::warn("{}: skipped ({})", src.source_id, sr.error);
        }
        report.sources.push_back(std::move(sr));
    }
    if (report.succeeded == 0) throw PipelineError("every source failed; keeping the previous snapshot");

    const auto previous = holder.current();
    for (const auto& t : store->triples()) {
        if (!previous->contains(t)) ++report.new_triples;
    }
    report.snapshot_triples = store->size();
    if (!config.snapshot.empty()) write_atomically(config.snapshot, store->dump_ntriples());
    holder.publish(std::move(store));
    return report;
}

// ---------------------------------------------------------------------------
// Scheduler
// ---------------------------------------------------------------------------

std::chrono::sys_seconds next_fire(std::chrono::sys_seconds now, std::chrono::minutes time_of_day) {
    const auto day = std::chrono::floor<std::chrono::days>(now);
    auto fire = std::chrono::sys_seconds(day) + time_of_day;
    if (fire <= now) fire += std::chrono::days(1);
    return fire;
}

Scheduler::Scheduler(std::chrono::minutes time_of_day, Job job) : time_of_day_(time_of_day), job_(std::move(job)) {}

Scheduler::~Scheduler() {
    stop();
}

void Scheduler::start() {
    std::lock_guard lock(mutex_);
    if (thread_.joinable()) return;
    stopping_ = false;
    thread_ = std::thread([this] { loop(); });
}

void Scheduler::stop() {
    {
        std::lock_guard lock(mutex_);
        stopping_ = true;
    }
    wake_.notify_all();
    if (thread_.joinable()) thread_.join();
}

void Scheduler::loop() {
    std::unique_lock lock(mutex_);
    while (!stopping_) {
        const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
        const auto fire = next_fire(now, time_of_day_);
        spdlog::info("next pipeline run at {}", format_instant(fire));
        if (wake_.wait_until(lock, fire, [this] { return stopping_; })) break;
        lock.unlock();
        try {
            job_(utc_day(fire));
        } catch (const std::exception& e) {
            spdlog::error("scheduled run failed: {}", e.what());
        }
        lock.lock();
    }
}

} // namespace covkg::service
