#pragma once

#include "covkg/ingest.hpp"
#include "covkg/model.hpp"
#include "covkg/sparql.hpp"
#include "covkg/store.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

namespace covkg::service {

// ---------------------------------------------------------------------------
// Map rendering
// ---------------------------------------------------------------------------

enum class ColorScale { numeric_white_red, categorical };

struct RenderSpec {
    std::string color_variable;
    /// Chosen from the values when absent: numeric if every value is.
    std::optional<ColorScale> scale;
};

ColorScale parse_color_scale(std::string_view s);

/// `#FFxxxx` for t in [0, 1]: white at 0, red at 1.
std::string white_red(double t);

/// Palette color picked by an FNV-1a hash of the label.
std::string categorical_color(std::string_view label);

/// One Feature per row: geometry from the first WKT-valued variable (header
/// order), every other binding as a property, plus `fillColor`. Throws
/// RenderError.
nlohmann::json render_geojson(const sparql::ResultSet& results, const RenderSpec& spec);

/// FeatureCollection of the regions that carry geometry.
nlohmann::json regions_geojson(const TripleStore& store);

// ---------------------------------------------------------------------------
// Deployment and pipeline
// ---------------------------------------------------------------------------

struct DeploymentConfig {
    std::vector<ingest::SourceConfig> sources;
    std::filesystem::path region_map;
    std::filesystem::path template_path;
    std::vector<std::filesystem::path> base_data;
    std::filesystem::path snapshot;    // empty: not persisted
    std::filesystem::path rejects_dir; // empty: not persisted
    std::string bind_host = "127.0.0.1";
    int bind_port = 8080;
    std::chrono::minutes schedule_utc{120};
    std::chrono::milliseconds service_timeout{std::chrono::seconds(30)};
    std::map<std::string, std::string> endpoint_rewrites;
};

/// Reads the deployment document; relative paths resolve against its
/// directory. COVKG_BIND (host:port) and COVKG_SNAPSHOT override the file.
/// Throws ConfigError.
DeploymentConfig load_deployment(const std::filesystem::path& file);

/// "HH:MM" -> minutes after midnight. Throws ConfigError.
std::chrono::minutes parse_time_of_day(std::string_view text);

struct SourceReport {
    std::string source_id;
    bool ok = false;
    std::string error;
    std::size_t documents = 0;
    std::size_t parsed = 0;   // records
    std::size_t rejected = 0; // parse and mapping rejects
    std::size_t reports = 0;
    std::size_t triples = 0;
};

struct PipelineReport {
    std::vector<SourceReport> sources;
    std::size_t succeeded = 0;
    std::size_t snapshot_triples = 0;
    std::size_t new_triples = 0; // relative to the previously published snapshot

    nlohmann::json to_json() const;
};

/// fetch -> decode -> parse -> map -> aggregate/align -> expand -> new store
/// -> publish (and persist). A failing source is skipped and recorded.
/// Throws PipelineError when every source fails; the holder keeps its
/// previous snapshot then.
PipelineReport run_pipeline(const DeploymentConfig& config, Date today, SnapshotHolder& holder);

/// Loads a persisted N-Triples snapshot into a fresh store.
std::shared_ptr<const TripleStore> load_snapshot(const std::filesystem::path& file);

/// Writes `content` next to `file` and renames it into place.
void write_atomically(const std::filesystem::path& file, const std::string& content);

// ---------------------------------------------------------------------------
// Scheduling
// ---------------------------------------------------------------------------

/// First instant strictly after `now` at the given UTC time of day.
std::chrono::sys_seconds next_fire(std::chrono::sys_seconds now, std::chrono::minutes time_of_day);

/// Runs a job once a day at a fixed UTC time on a background thread.
class Scheduler {
public:
    using Job = std::function<void(Date today)>;

    Scheduler(std::chrono::minutes time_of_day, Job job);
    ~Scheduler();
    Scheduler(const Scheduler&) = delete;
    Scheduler& operator=(const Scheduler&) = delete;

    void start();
    void stop();

private:
    void loop();

    std::chrono::minutes time_of_day_;
    Job job_;
    std::mutex mutex_;
    std::condition_variable wake_;
    bool stopping_ = false;
    std::thread thread_;
};

} // namespace covkg::service
