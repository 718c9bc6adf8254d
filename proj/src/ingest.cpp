#include "covkg/ingest.hpp"

#include "covkg/errors.hpp"
#include "covkg/federation.hpp"
#include "covkg/rdf.hpp"

#include <httplib.h>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace covkg::ingest {

namespace {

constexpr std::string_view kDatePlaceholder = "{date}";

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool is_remote(std::string_view location) {
    return location.starts_with("http://") || location.starts_with("https://");
}

std::string read_local(const std::string& source_id, std::string_view location) {
    std::string path(location);
    if (location.starts_with("file://")) path = std::string(location.substr(7));
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FetchError(source_id, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw FetchError(source_id, "read error on " + path);
    return std::move(buf).str();
}

std::string read_remote(const std::string& source_id, std::string_view location, std::chrono::milliseconds timeout) {
    sparql::Url url;
    try {
        url = sparql::split_url(location);
    } catch (const ValidationError& e) {
        throw FetchError(source_id, e.what());
    }
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    httplib::Client client(url.scheme + "://" + url.host + ":" + std::to_string(url.port));
    client.set_connection_timeout(secs.count(), micros.count());
    client.set_read_timeout(secs.count(), micros.count());
    client.set_follow_location(true);
    auto res = client.Get(url.path);
    if (!res) throw FetchError(source_id, "request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw FetchError(source_id, "HTTP status " + std::to_string(res->status));
    return res->body;
}

std::string read_location(const SourceConfig& cfg, std::string_view location) {
    return is_remote(location) ? read_remote(cfg.source_id, location, cfg.timeout)
                               : read_local(cfg.source_id, location);
}

std::string substitute_date(std::string_view location, Date day) {
    std::string out(location);
    const std::string d = format_date(day);
    for (auto pos = out.find(kDatePlaceholder); pos != std::string::npos; pos = out.find(kDatePlaceholder, pos)) {
        out.replace(pos, kDatePlaceholder.size(), d);
        pos += d.size();
    }
    return out;
}

std::string required_string(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_string() || j.at(key).get<std::string>().empty()) {
        throw ConfigError(fmt::format("source config needs a non-empty string '{}'", key));
    }
    return j.at(key).get<std::string>();
}

std::string optional_string(const nlohmann::json& j, const char* key, std::string fallback = {}) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    if (!j.at(key).is_string()) throw ConfigError(fmt::format("source config field '{}' must be a string", key));
    return j.at(key).get<std::string>();
}

// --- observation extraction --------------------------------------------------

struct Observation {
    std::string location;
    std::string raw;
    std::optional<std::string> region_key;
    std::optional<std::string> timestamp;
    bool timestamp_is_epoch_ms = false;
    std::optional<std::string> infected;
    std::optional<std::string> lon;
    std::optional<std::string> lat;
};

std::optional<std::int64_t> parse_count(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

void convert(const SourceConfig& cfg, Observation obs, ParseResult& out) {
    ++out.observations;
    auto reject = [&](std::string reason) {
        out.rejects.push_back({cfg.source_id, obs.location, std::move(reason), obs.raw});
    };
    auto missing = [](const std::optional<std::string>& v) { return !v || trim(*v).empty(); };

    if (missing(obs.region_key)) return reject("missing region key");
    if (missing(obs.timestamp)) return reject("missing timestamp");
    if (missing(obs.infected)) return reject("missing infected count");

    SourceRecord rec;
    rec.source_id = cfg.source_id;
    rec.raw_region_key = std::string(trim(*obs.region_key));
    try {
        rec.timestamp = parse_instant(trim(*obs.timestamp));
    } catch (const ValidationError& e) {
        return reject(e.what());
    }
    const auto count = parse_count(*obs.infected);
    if (!count) return reject("infected count is not an integer: '" + *obs.infected + "'");
    if (*count < 0) return reject("negative infected count");
    rec.infected = *count;
    if (obs.lon && !trim(*obs.lon).empty()) rec.extra["lon"] = std::string(trim(*obs.lon));
    if (obs.lat && !trim(*obs.lat).empty()) rec.extra["lat"] = std::string(trim(*obs.lat));
    out.records.push_back(std::move(rec));
}

struct CsvRow {
    std::size_t line;
    std::vector<std::string> fields;
};

std::vector<CsvRow> read_csv_rows(std::string_view text, char delimiter) {
    std::vector<CsvRow> rows;
    CsvRow row{1, {}};
    std::string field;
    std::size_t line = 1;
    bool in_quotes = false;
    bool row_has_content = false;
    std::size_t quote_line = 0;

    auto end_row = [&] {
        if (row_has_content) {
            row.fields.push_back(std::move(field));
            rows.push_back(std::move(row));
        }
        field.clear();
        row = CsvRow{line + 1, {}};
        row_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        if (c == '"') {
            in_quotes = true;
            quote_line = line;
            row_has_content = true;
        } else if (c == delimiter) {
            row.fields.push_back(std::move(field));
            field.clear();
            row_has_content = true;
        } else if (c == '\n') {
            end_row();
            ++line;
        } else if (c == '\r') {
            // CRLF; a bare CR inside a field is dropped as well
        } else {
            field += c;
            row_has_content = true;
        }
    }
    if (in_quotes) throw ParseError(fmt::format("line {}", quote_line), "unterminated quoted field");
    end_row();
    return rows;
}

ParseResult parse_csv(const SourceConfig& cfg, std::string_view text) {
    ParseResult out;
    auto rows = read_csv_rows(text, cfg.delimiter);
    if (rows.empty()) return out;

    const auto& header = rows.front().fields;
    auto column = [&](const std::string& name) -> std::optional<std::size_t> {
        if (name.empty()) return std::nullopt;
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (trim(header[i]) == name) return i;
        }
        return std::nullopt;
    };
    const auto key_col = column(cfg.fields.region_key);
    const auto ts_col = column(cfg.fields.timestamp);
    const auto inf_col = column(cfg.fields.infected);
    if (!key_col || !ts_col || !inf_col) {
        throw ParseError("line 1", fmt::format("header lacks one of the mapped columns '{}', '{}', '{}'",
                                               cfg.fields.region_key, cfg.fields.timestamp, cfg.fields.infected));
    }
    const auto lon_col = column(cfg.fields.lon);
    const auto lat_col = column(cfg.fields.lat);

    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& f = rows[r].fields;
        Observation obs;
        obs.location = fmt::format("line {}", rows[r].line);
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (i) obs.raw += cfg.delimiter;
            obs.raw += f[i];
        }
        auto cell = [&](std::optional<std::size_t> col) -> std::optional<std::string> {
            if (!col || *col >= f.size()) return std::nullopt;
            return f[*col];
        };
        obs.region_key = cell(key_col);
        obs.timestamp = cell(ts_col);
        obs.infected = cell(inf_col);
        obs.lon = cell(lon_col);
        obs.lat = cell(lat_col);
        convert(cfg, std::move(obs), out);
    }
    return out;
}

const nlohmann::json* walk(const nlohmann::json& root, std::string_view path) {
    const nlohmann::json* cur = &root;
    while (!path.empty()) {
        const auto dot = path.find('.');
        const std::string key(path.substr(0, dot));
        if (!cur->is_object()) return nullptr;
        auto it = cur->find(key);
        if (it == cur->end()) return nullptr;
        cur = &*it;
        path = dot == std::string_view::npos ? std::string_view{} : path.substr(dot + 1);
    }
    return cur;
}

std::optional<std::string> scalar_text(const nlohmann::json* v) {
    if (!v || v->is_null()) return std::nullopt;
    if (v->is_string()) return v->get<std::string>();
    if (v->is_number_integer()) return std::to_string(v->get<std::int64_t>());
    if (v->is_number_unsigned()) return std::to_string(v->get<std::uint64_t>());
    if (v->is_number_float()) {
        const double d = v->get<double>();
        if (d == static_cast<double>(static_cast<std::int64_t>(d))) return std::to_string(static_cast<std::int64_t>(d));
        return fmt::format("{}", d);
    }
    if (v->is_boolean()) return v->get<bool>() ? "true" : "false";
    return std::nullopt;
}

ParseResult parse_json(const SourceConfig& cfg, std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(fmt::format("byte {}", e.byte), e.what());
    }
    const nlohmann::json* records = walk(doc, cfg.records_path);
    if (!records || !records->is_array()) {
        throw ParseError(cfg.records_path.empty() ? "document root" : "path " + cfg.records_path,
                         "expected an array of records");
    }
    ParseResult out;
    std::size_t index = 0;
    for (const auto& item : *records) {
        Observation obs;
        obs.location = fmt::format("record {}", index++);
        obs.raw = item.dump();
        auto field = [&](const std::string& path) -> std::optional<std::string> {
            if (path.empty()) return std::nullopt;
            return scalar_text(walk(item, path));
        };
        obs.region_key = field(cfg.fields.region_key);
        obs.timestamp = field(cfg.fields.timestamp);
        obs.infected = field(cfg.fields.infected);
        obs.lon = field(cfg.fields.lon);
        obs.lat = field(cfg.fields.lat);
        convert(cfg, std::move(obs), out);
    }
    return out;
}

template <class E>
E parse_enum(std::string_view s, std::initializer_list<std::pair<std::string_view, E>> table, const char* what) {
    for (const auto& [name, value] : table) {
        if (name == s) return value;
    }
    throw ConfigError(fmt::format("unknown {} '{}'", what, s));
}

} // namespace

Kind parse_kind(std::string_view s) {
    return parse_enum<Kind>(s, {{"csv", Kind::csv}, {"json", Kind::json}}, "source kind");
}

Encoding parse_encoding(std::string_view s) {
    return parse_enum<Encoding>(s, {{"utf8", Encoding::utf8}, {"latin1", Encoding::latin1}, {"auto", Encoding::detect}},
                                "encoding");
}

Cadence parse_cadence(std::string_view s) {
    return parse_enum<Cadence>(
        s, {{"hourly", Cadence::hourly}, {"daily", Cadence::daily}, {"irregular", Cadence::irregular}}, "cadence");
}

UpdateStyle parse_update_style(std::string_view s) {
    return parse_enum<UpdateStyle>(s,
                                   {{"appendPerDay", UpdateStyle::append_per_day},
                                    {"overwrite", UpdateStyle::overwrite},
                                    {"endpoint", UpdateStyle::endpoint}},
                                   "update style");
}

std::string_view to_string(Kind k) {
    return k == Kind::csv ? "csv" : "json";
}

std::string_view to_string(Encoding e) {
    switch (e) {
    case Encoding::utf8: return "utf8";
    case Encoding::latin1: return "latin1";
    case Encoding::detect: return "auto";
    }
    return "utf8";
}

std::string_view to_string(Cadence c) {
    switch (c) {
    case Cadence::hourly: return "hourly";
    case Cadence::daily: return "daily";
    case Cadence::irregular: return "irregular";
    }
    return "daily";
}

std::string_view to_string(UpdateStyle u) {
    switch (u) {
    case UpdateStyle::append_per_day: return "appendPerDay";
    case UpdateStyle::overwrite: return "overwrite";
    case UpdateStyle::endpoint: return "endpoint";
    }
    return "overwrite";
}

SourceConfig source_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw ConfigError("source config must be an object");
    SourceConfig cfg;
    cfg.source_id = required_string(j, "id");
    try {
        cfg.kind = parse_kind(required_string(j, "kind"));
        cfg.location = required_string(j, "location");
        cfg.encoding = parse_encoding(optional_string(j, "encoding", "utf8"));
        cfg.cadence = parse_cadence(optional_string(j, "cadence", "daily"));
        cfg.update_style = parse_update_style(optional_string(j, "updateStyle", "overwrite"));

        if (!j.contains("fieldMap") || !j.at("fieldMap").is_object()) throw ConfigError("missing fieldMap");
        const auto& fm = j.at("fieldMap");
        cfg.fields.region_key = required_string(fm, "regionKey");
        cfg.fields.timestamp = required_string(fm, "timestamp");
        cfg.fields.infected = required_string(fm, "infected");
        cfg.fields.lon = optional_string(fm, "lon");
        cfg.fields.lat = optional_string(fm, "lat");

        const std::string delimiter = optional_string(j, "delimiter", ",");
        if (delimiter.size() != 1) throw ConfigError("delimiter must be a single character");
        cfg.delimiter = delimiter[0];
        cfg.records_path = optional_string(j, "recordsPath");
        if (j.contains("aggregate")) cfg.aggregate = j.at("aggregate").get<bool>();
        if (const auto start = optional_string(j, "startDate"); !start.empty()) cfg.start_date = parse_date(start);
        if (j.contains("timeoutMs")) cfg.timeout = std::chrono::milliseconds(j.at("timeoutMs").get<std::int64_t>());
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("source '{}': {}", cfg.source_id, e.what()));
    } catch (const ValidationError& e) {
        throw ConfigError(fmt::format("source '{}': {}", cfg.source_id, e.what()));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("source '{}': {}", cfg.source_id, e.what()));
    }

    const bool templated = cfg.location.find(kDatePlaceholder) != std::string::npos;
    if (templated && !cfg.start_date) {
        throw ConfigError(fmt::format("source '{}': a {{date}} location needs startDate", cfg.source_id));
    }
    if (!is_remote(cfg.location)) {
        std::filesystem::path p = cfg.location.starts_with("file://") ? cfg.location.substr(7) : cfg.location;
        if (p.is_relative() && !base_dir.empty()) cfg.location = (base_dir / p).lexically_normal().string();
    }
    return cfg;
}

nlohmann::json to_json(const SourceConfig& cfg) {
    nlohmann::json fm{{"regionKey", cfg.fields.region_key},
                      {"timestamp", cfg.fields.timestamp},
                      {"infected", cfg.fields.infected}};
    if (!cfg.fields.lon.empty()) fm["lon"] = cfg.fields.lon;
    if (!cfg.fields.lat.empty()) fm["lat"] = cfg.fields.lat;
    nlohmann::json j{{"id", cfg.source_id},
                     {"kind", to_string(cfg.kind)},
                     {"location", cfg.location},
                     {"encoding", to_string(cfg.encoding)},
                     {"fieldMap", fm},
                     {"cadence", to_string(cfg.cadence)},
                     {"updateStyle", to_string(cfg.update_style)},
                     {"delimiter", std::string(1, cfg.delimiter)},
                     {"aggregate", cfg.aggregate},
                     {"timeoutMs", cfg.timeout.count()}};
    if (!cfg.records_path.empty()) j["recordsPath"] = cfg.records_path;
    if (cfg.start_date) j["startDate"] = format_date(*cfg.start_date);
    return j;
}

std::vector<SourceConfig> parse_source_configs(std::string_view document, const std::filesystem::path& base_dir) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("source config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("version") || doc.at("version") != 1) {
        throw ConfigError("source config must declare \"version\": 1");
    }
    if (!doc.contains("sources") || !doc.at("sources").is_array()) throw ConfigError("missing \"sources\" array");
    std::vector<SourceConfig> out;
    std::set<std::string> ids;
    for (const auto& s : doc.at("sources")) {
        auto cfg = source_config_from_json(s, base_dir);
        if (!ids.insert(cfg.source_id).second) throw ConfigError("duplicate source id '" + cfg.source_id + "'");
        out.push_back(std::move(cfg));
    }
    return out;
}

std::vector<SourceConfig> load_source_configs(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_source_configs(buf.str(), file.parent_path());
}

std::string fetch(const SourceConfig& cfg) {
    return read_location(cfg, cfg.location);
}

std::vector<Document> fetch_documents(const SourceConfig& cfg, Date today) {
    if (cfg.location.find(kDatePlaceholder) == std::string::npos) {
        return {Document{cfg.location, std::nullopt, fetch(cfg)}};
    }
    std::vector<Document> docs;
    std::size_t gaps = 0;
    for (Date day = *cfg.start_date; day < today; day += std::chrono::days(1)) {
        const std::string location = substitute_date(cfg.location, day);
        try {
            docs.push_back({location, day, read_location(cfg, location)});
        } catch (const FetchError& e) {
            ++gaps;
            spdlog::debug("{}: no document for {} ({})", cfg.source_id, format_date(day), e.what());
        }
    }
    if (docs.empty()) throw FetchError(cfg.source_id, "no per-day document could be read");
    if (gaps) spdlog::info("{}: {} day(s) without a document", cfg.source_id, gaps);
    return docs;
}

std::optional<std::size_t> first_invalid_utf8(std::string_view bytes) {
    const auto* s = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::size_t n = bytes.size();
    std::size_t i = 0;
    while (i < n) {
        const unsigned char c = s[i];
        if (c < 0x80) {
            ++i;
            continue;
        }
        std::size_t len = 0;
        char32_t cp = 0;
        char32_t min = 0;
        if ((c & 0xE0) == 0xC0) {
            len = 2, cp = c & 0x1F, min = 0x80;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3, cp = c & 0x0F, min = 0x800;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4, cp = c & 0x07, min = 0x10000;
        } else {
            return i;
        }
        if (i + len > n) return i;
        for (std::size_t k = 1; k < len; ++k) {
            if ((s[i + k] & 0xC0) != 0x80) return i;
            cp = (cp << 6) | (s[i + k] & 0x3F);
        }
        if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return i;
        i += len;
    }
    return std::nullopt;
}

std::string decode(std::string_view bytes, Encoding encoding) {
    auto latin1 = [](std::string_view in) {
        std::string out;
        out.reserve(in.size());
        for (char c : in) rdf::append_utf8(out, static_cast<unsigned char>(c));
        return out;
    };
    auto strip_bom = [](std::string_view in) {
        return in.starts_with("\xEF\xBB\xBF") ? in.substr(3) : in;
    };
    switch (encoding) {
    case Encoding::latin1: return latin1(bytes);
    case Encoding::utf8:
        if (auto bad = first_invalid_utf8(bytes)) throw EncodingError(*bad, "invalid UTF-8");
        return std::string(strip_bom(bytes));
    case Encoding::detect:
        if (!first_invalid_utf8(bytes)) return std::string(strip_bom(bytes));
        return latin1(bytes);
    }
    return std::string(bytes);
}

std::string encode(std::string_view text, Encoding encoding) {
    if (auto bad = first_invalid_utf8(text)) throw EncodingError(*bad, "text is not valid UTF-8");
    if (encoding != Encoding::latin1) return std::string(text);
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        const auto c = static_cast<unsigned char>(text[i]);
        if (c < 0x80) {
            out += static_cast<char>(c);
            ++i;
        } else if ((c & 0xE0) == 0xC0) {
            const char32_t cp = ((c & 0x1F) << 6) | (static_cast<unsigned char>(text[i + 1]) & 0x3F);
            if (cp > 0xFF) throw EncodingError(i, "character not representable in Latin-1");
            out += static_cast<char>(cp);
            i += 2;
        } else {
            throw EncodingError(i, "character not representable in Latin-1");
        }
    }
    return out;
}

std::vector<std::vector<std::string>> read_csv(std::string_view text, char delimiter) {
    std::vector<std::vector<std::string>> out;
    for (auto& row : read_csv_rows(text, delimiter)) out.push_back(std::move(row.fields));
    return out;
}

ParseResult parse(const SourceConfig& cfg, std::string_view text) {
    return cfg.kind == Kind::csv ? parse_csv(cfg, text) : parse_json(cfg, text);
}

} // namespace covkg::ingest
