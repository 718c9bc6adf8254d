#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace covkg {

/// Base of every error raised by the library. `kind()` is the stable class
/// name reported in machine-readable error payloads.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "Error"; }
};

#define COVKG_SIMPLE_ERROR(Name)                                              \
    class Name : public Error {                                               \
    public:                                                                   \
        using Error::Error;                                                   \
        const char* kind() const noexcept override { return #Name; }          \
    };

COVKG_SIMPLE_ERROR(ValidationError)
COVKG_SIMPLE_ERROR(ConfigError)
COVKG_SIMPLE_ERROR(NoGeometryError)
COVKG_SIMPLE_ERROR(AggregationError)
COVKG_SIMPLE_ERROR(RollupError)
COVKG_SIMPLE_ERROR(UnsupportedGeometryError)
COVKG_SIMPLE_ERROR(PredicateDomainError)
COVKG_SIMPLE_ERROR(DegenerateGeometryError)
COVKG_SIMPLE_ERROR(FilterTypeError)
COVKG_SIMPLE_ERROR(InsufficientDataError)
COVKG_SIMPLE_ERROR(UndefinedCorrelationError)
COVKG_SIMPLE_ERROR(RenderError)
COVKG_SIMPLE_ERROR(PipelineError)

#undef COVKG_SIMPLE_ERROR

class FetchError : public Error {
public:
    FetchError(std::string source_id, const std::string& what)
        : Error("fetch failed for source '" + source_id + "': " + what),
          source_id_(std::move(source_id)) {}
    const char* kind() const noexcept override { return "FetchError"; }
    const std::string& source_id() const noexcept { return source_id_; }

private:
    std::string source_id_;
};

class EncodingError : public Error {
public:
    EncodingError(std::size_t offset, const std::string& what)
        : Error(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}
    const char* kind() const noexcept override { return "EncodingError"; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Structurally unparseable input document. `location` is a human readable
/// position such as "line 4" or "byte 120".
class ParseError : public Error {
public:
    ParseError(std::string location, const std::string& what)
        : Error(what + " (" + location + ")"), location_(std::move(location)) {}
    const char* kind() const noexcept override { return "ParseError"; }
    const std::string& location() const noexcept { return location_; }

private:
    std::string location_;
};

class UnknownRegionError : public Error {
public:
    UnknownRegionError(std::string source_id, std::string key)
        : Error("no NUTS mapping for key '" + key + "' of source '" + source_id + "'"),
          source_id_(std::move(source_id)), key_(std::move(key)) {}
    const char* kind() const noexcept override { return "UnknownRegionError"; }
    const std::string& source_id() const noexcept { return source_id_; }
    const std::string& key() const noexcept { return key_; }

private:
    std::string source_id_;
    std::string key_;
};

class WktParseError : public Error {
public:
    WktParseError(std::size_t offset, const std::string& what)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    const char* kind() const noexcept override { return "WktParseError"; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Raised by template expansion. `name()` is the offending variable or
/// function; `row()` is the template row index, or -1 when not applicable.
class TemplateError : public Error {
public:
    TemplateError(std::string name, const std::string& what, int row = -1)
        : Error(what), name_(std::move(name)), row_(row) {}
    const char* kind() const noexcept override { return "TemplateError"; }
    const std::string& name() const noexcept { return name_; }
    int row() const noexcept { return row_; }

private:
    std::string name_;
    int row_;
};

class LoadError : public Error {
public:
    LoadError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    const char* kind() const noexcept override { return "LoadError"; }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class QuerySyntaxError : public Error {
public:
    QuerySyntaxError(std::size_t line, std::size_t column, const std::string& what)
        : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
          line_(line), column_(column) {}
    const char* kind() const noexcept override { return "QuerySyntaxError"; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class UnsupportedFeatureError : public Error {
public:
    explicit UnsupportedFeatureError(std::string feature)
        : Error("unsupported query feature: " + feature), feature_(std::move(feature)) {}
    const char* kind() const noexcept override { return "UnsupportedFeatureError"; }
    const std::string& feature() const noexcept { return feature_; }

private:
    std::string feature_;
};

class ServiceError : public Error {
public:
    ServiceError(std::string endpoint, const std::string& what)
        : Error("SERVICE <" + endpoint + "> failed: " + what), endpoint_(std::move(endpoint)) {}
    const char* kind() const noexcept override { return "ServiceError"; }
    const std::string& endpoint() const noexcept { return endpoint_; }

private:
    std::string endpoint_;
};

} // namespace covkg
