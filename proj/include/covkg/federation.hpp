#pragma once

#include "covkg/sparql.hpp"

#include <chrono>
#include <map>
#include <string>

namespace covkg::sparql {

/// SPARQL protocol client: POSTs `query=` as a form and expects the JSON
/// results format back.
class HttpServiceClient : public ServiceClient {
public:
    struct Options {
        std::chrono::milliseconds timeout{std::chrono::seconds(30)};
        /// Endpoint IRI -> URL actually contacted (mirrors, local mocks).
        std::map<std::string, std::string> rewrites;
    };

    HttpServiceClient() = default;
    explicit HttpServiceClient(Options options) : options_(std::move(options)) {}

    ResultSet select(const std::string& endpoint, const std::string& query) override;

private:
    Options options_;
};

struct Url {
    std::string scheme;
    std::string host;
    int port = 0;
    std::string path;
};

/// Splits an absolute http(s) URL. Throws ValidationError.
Url split_url(std::string_view url);

} // namespace covkg::sparql
