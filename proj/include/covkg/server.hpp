#pragma once

#include "covkg/errors.hpp"
#include "covkg/service.hpp"
#include "covkg/sparql.hpp"
#include "covkg/store.hpp"

#include <memory>
#include <string>
#include <thread>

namespace covkg::service {

struct HttpResult {
    int status = 200;
    std::string content_type;
    std::string body;
};

/// Error payload: {"error": kind, "message": ..., plus "line"/"column",
/// "feature" or "endpoint" when the error carries them}.
nlohmann::json error_body(const Error& e);

/// Query endpoint logic without the transport: 200 with JSON results (or
/// CSV when `accept` asks for text/csv), 400 for syntax, unsupported
/// features and filter type errors, 502 for SERVICE failures.
HttpResult handle_query(const TripleStore& store, std::string_view query, std::string_view accept,
                        sparql::ServiceClient* services);

/// Render endpoint logic. The request is {"results": <results JSON> or
/// "query": text, "colorVariable": name, "scale": optional}.
HttpResult handle_render(const TripleStore& store, std::string_view request, sparql::ServiceClient* services);

struct ServerOptions {
    sparql::ServiceClient* services = nullptr;
};

/// POST|GET /query, GET /dataset.nt, GET /regions.geojson, POST /render,
/// GET /health. Every request reads the snapshot current at its start.
class Server {
public:
    explicit Server(SnapshotHolder& holder, ServerOptions options = {});
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds to a free port and returns it, or -1.
    int bind_any_port(const std::string& host);
    bool bind(const std::string& host, int port);

    /// Blocks until stop().
    void listen();
    /// Serves on a background thread.
    void start();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
};

} // namespace covkg::service
