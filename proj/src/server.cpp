#include "covkg/server.hpp"

#include "covkg/errors.hpp"

#include <httplib.h>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace covkg::service {

nlohmann::json error_body(const Error& e) {
    nlohmann::json j{{"error", e.kind()}, {"message", e.what()}};
    if (const auto* s = dynamic_cast<const QuerySyntaxError*>(&e)) {
        j["line"] = s->line();
        j["column"] = s->column();
    } else if (const auto* u = dynamic_cast<const UnsupportedFeatureError*>(&e)) {
        j["feature"] = u->feature();
    } else if (const auto* se = dynamic_cast<const ServiceError*>(&e)) {
        j["endpoint"] = se->endpoint();
    }
    return j;
}

namespace {

constexpr const char* kJson = "application/json";
constexpr const char* kResultsJson = "application/sparql-results+json";

int status_for(const Error& e) {
    if (dynamic_cast<const QuerySyntaxError*>(&e) || dynamic_cast<const UnsupportedFeatureError*>(&e) ||
        dynamic_cast<const FilterTypeError*>(&e) || dynamic_cast<const RenderError*>(&e)) {
        return 400;
    }
    if (dynamic_cast<const ServiceError*>(&e)) return 502;
    return 500;
}

HttpResult error_result(const Error& e) {
    return {status_for(e), kJson, error_body(e).dump()};
}

sparql::ResultSet run_query(const TripleStore& store, std::string_view query, sparql::ServiceClient* services) {
    const auto plan = sparql::parse_query(query, {vocab::standard_prefixes()});
    sparql::EvalOptions options;
    options.services = services;
    return sparql::evaluate(plan, store, options);
}

} // namespace

HttpResult handle_query(const TripleStore& store, std::string_view query, std::string_view accept,
                        sparql::ServiceClient* services) {
    try {
        const auto results = run_query(store, query, services);
        if (accept.find("text/csv") != std::string_view::npos) return {200, "text/csv; charset=utf-8", sparql::to_csv(results)};
        return {200, kResultsJson, sparql::to_json(results).dump()};
    } catch (const Error& e) {
        return error_result(e);
    }
}

HttpResult handle_render(const TripleStore& store, std::string_view request, sparql::ServiceClient* services) {
    try {
        nlohmann::json req;
        try {
            req = nlohmann::json::parse(request);
        } catch (const nlohmann::json::parse_error& e) {
            throw RenderError(std::string("request is not JSON: ") + e.what());
        }
        if (!req.is_object() || !req.contains("colorVariable") || !req.at("colorVariable").is_string()) {
            throw RenderError("request needs a string \"colorVariable\"");
        }
        RenderSpec spec;
        spec.color_variable = req.at("colorVariable").get<std::string>();
        if (req.contains("scale")) spec.scale = parse_color_scale(req.at("scale").get<std::string>());

        sparql::ResultSet results;
        if (req.contains("results")) {
            try {
                results = sparql::results_from_json(req.at("results"));
            } catch (const ValidationError& e) {
                throw RenderError(e.what());
            }
        } else if (req.contains("query") && req.at("query").is_string()) {
            results = run_query(store, req.at("query").get<std::string>(), services);
        } else {
            throw RenderError("request needs \"results\" or \"query\"");
        }
        return {200, "application/geo+json", render_geojson(results, spec).dump()};
    } catch (const Error& e) {
        return error_result(e);
    }
}

struct Server::Impl {
    SnapshotHolder& holder;
    ServerOptions options;
    httplib::Server http;

    Impl(SnapshotHolder& h, ServerOptions o) : holder(h), options(o) {}

    static void reply(httplib::Response& res, const HttpResult& r) {
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    }

    void query(const httplib::Request& req, httplib::Response& res) {
        std::string text;
        const std::string content_type = req.get_header_value("Content-Type");
        if (req.has_param("query")) {
            text = req.get_param_value("query");
        } else if (req.method == "POST" && content_type.starts_with("application/sparql-query")) {
            text = req.body;
        } else {
            reply(res, {400, kJson,
                        nlohmann::json{{"error", "BadRequest"}, {"message", "no query in request"}}.dump()});
            return;
        }
        const auto snapshot = holder.current();
        reply(res, handle_query(*snapshot, text, req.get_header_value("Accept"), options.services));
    }

    void routes() {
        http.Get("/query", [this](const httplib::Request& req, httplib::Response& res) { query(req, res); });
        http.Post("/query", [this](const httplib::Request& req, httplib::Response& res) { query(req, res); });
        http.Get("/dataset.nt", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(holder.current()->dump_ntriples(), "application/n-triples");
        });
        http.Get("/regions.geojson", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(regions_geojson(*holder.current()).dump(), "application/geo+json");
        });
        http.Post("/render", [this](const httplib::Request& req, httplib::Response& res) {
            reply(res, handle_render(*holder.current(), req.body, options.services));
        });
        http.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(nlohmann::json{{"status", "ok"}, {"triples", holder.current()->size()}}.dump(), kJson);
        });
        http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            std::string what = "internal error";
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                what = e.what();
            } catch (...) {
            }
            spdlog::error("request failed: {}", what);
            res.status = 500;
            res.set_content(nlohmann::json{{"error", "InternalError"}, {"message", what}}.dump(), kJson);
        });
    }
};

Server::Server(SnapshotHolder& holder, ServerOptions options) : impl_(std::make_unique<Impl>(holder, options)) {
    impl_->routes();
}

Server::~Server() {
    stop();
}

int Server::bind_any_port(const std::string& host) {
    return impl_->http.bind_to_any_port(host);
}

bool Server::bind(const std::string& host, int port) {
    return impl_->http.bind_to_port(host, port);
}

void Server::listen() {
    impl_->http.listen_after_bind();
}

void Server::start() {
    thread_ = std::thread([this] { impl_->http.listen_after_bind(); });
    impl_->http.wait_until_ready();
}

void Server::stop() {
    impl_->http.stop();
    if (thread_.joinable()) thread_.join();
}

} // namespace covkg::service
