#pragma once

#include "covkg/model.hpp"

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

/// Configuration-driven connectors: fetch bytes, decode them, parse records.
namespace covkg::ingest {

enum class Kind { csv, json };
enum class Encoding { utf8, latin1, detect };
enum class Cadence { hourly, daily, irregular };
enum class UpdateStyle { append_per_day, overwrite, endpoint };

/// Logical field -> CSV column name or dotted JSON path.
struct FieldMap {
    std::string region_key;
    std::string timestamp;
    std::string infected;
    // Optional coordinates, used for records without a region mapping.
    std::string lon;
    std::string lat;
};

struct SourceConfig {
    std::string source_id;
    Kind kind = Kind::csv;
    /// Path, file:// URL or http(s) URL. Append-per-day sources may contain a
    /// `{date}` placeholder expanded for every day since `start_date`.
    std::string location;
    Encoding encoding = Encoding::utf8;
    FieldMap fields;
    Cadence cadence = Cadence::daily;
    UpdateStyle update_style = UpdateStyle::overwrite;
    char delimiter = ',';
    /// Dotted path to the records array of a JSON document ("" = root).
    std::string records_path;
    /// Raw keys denote sub-regions summed into their NUTS region.
    bool aggregate = false;
    std::optional<Date> start_date;
    std::chrono::milliseconds timeout{std::chrono::seconds(30)};
};

/// Versioned source list: {"version": 1, "sources": [...]}. Relative local
/// locations are resolved against `base_dir`. Throws ConfigError.
std::vector<SourceConfig> parse_source_configs(std::string_view document, const std::filesystem::path& base_dir = {});
std::vector<SourceConfig> load_source_configs(const std::filesystem::path& file);

SourceConfig source_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const SourceConfig& cfg);

/// Raw bytes at the configured location. Throws FetchError.
std::string fetch(const SourceConfig& cfg);

struct Document {
    std::string location;
    std::optional<Date> day; // set for per-day files
    std::string bytes;
};

/// Every document a run should read. For `{date}` locations one document per
/// day in [start_date, today); missing days are gaps. FetchError when nothing
/// could be read.
std::vector<Document> fetch_documents(const SourceConfig& cfg, Date today);

/// Bytes as UTF-8 text. A leading UTF-8 byte order mark is dropped. `detect`
/// tries strict UTF-8 and falls back to Latin-1. Throws EncodingError.
std::string decode(std::string_view bytes, Encoding encoding);

/// Inverse of decode for text the encoding can express. Throws EncodingError
/// (offset into the UTF-8 text) otherwise.
std::string encode(std::string_view text, Encoding encoding);

/// Byte offset of the first invalid UTF-8 sequence, if any.
std::optional<std::size_t> first_invalid_utf8(std::string_view bytes);

struct Reject {
    std::string source_id;
    std::string location; // "line 3", "record 7"
    std::string reason;
    std::string raw;
};

struct ParseResult {
    std::vector<SourceRecord> records;
    std::vector<Reject> rejects;
    std::size_t observations = 0; // records.size() + rejects.size()
};

/// One SourceRecord per observation. Observations missing a logical field
/// or carrying an unusable value are rejected. Throws ParseError when the
/// document structure itself is broken.
ParseResult parse(const SourceConfig& cfg, std::string_view text);

/// RFC 4180 style reader. Empty lines are skipped. Throws ParseError.
std::vector<std::vector<std::string>> read_csv(std::string_view text, char delimiter = ',');

Kind parse_kind(std::string_view s);
Encoding parse_encoding(std::string_view s);
Cadence parse_cadence(std::string_view s);
UpdateStyle parse_update_style(std::string_view s);

std::string_view to_string(Kind k);
std::string_view to_string(Encoding e);
std::string_view to_string(Cadence c);
std::string_view to_string(UpdateStyle u);

} // namespace covkg::ingest
