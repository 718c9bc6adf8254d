#include <doctest.h>

#include "covkg/errors.hpp"
#include "covkg/server.hpp"
#include "fixtures.hpp"

#include <httplib.h>

using namespace covkg;
using namespace covkg::service;

namespace {

struct Running {
    SnapshotHolder holder;
    fixture::StoreServiceClient services;
    std::unique_ptr<Server> server;
    int port = -1;

    explicit Running(const std::vector<rdf::Triple>& triples) {
        holder.publish(fixture::store_of(triples));
        services.add(fixture::kEuodp, fixture::euodp_triples());
        server = std::make_unique<Server>(holder, ServerOptions{&services});
        port = server->bind_any_port("127.0.0.1");
        REQUIRE(port > 0);
        server->start();
    }
    ~Running() { server->stop(); }

    httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

} // namespace

TEST_CASE("query endpoint") {
    Running r(fixture::query_world(2));
    auto cli = r.client();

    auto res = cli.Get("/query?query=" + httplib::detail::encode_query_param("SELECT * WHERE {?s ?p ?o} LIMIT 10"));
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("Content-Type").starts_with("application/sparql-results+json"));
    const auto body = nlohmann::json::parse(res->body);
    CHECK(body["results"]["bindings"].size() == 10);

    res = cli.Post("/query", "SELECT ?r WHERE { ?r nuts:level \"3\" }", "application/sparql-query");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(nlohmann::json::parse(res->body)["results"]["bindings"].size() == 6);

    httplib::Params form{{"query", "SELECT ?r WHERE { ?r nuts:code \"AT130\" }"}};
    httplib::Headers csv{{"Accept", "text/csv"}};
    res = cli.Post("/query", csv, form);
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body == "r\r\nhttp://nuts.geovocab.org/id/AT130\r\n");
}

TEST_CASE("query errors map to status codes") {
    Running r(fixture::query_world(1));
    auto cli = r.client();

    auto res = cli.Post("/query", "SELECT ?s WHERE { ?s ", "application/sparql-query");
    REQUIRE(res);
    CHECK(res->status == 400);
    auto body = nlohmann::json::parse(res->body);
    CHECK(body["error"] == "QuerySyntaxError");
    CHECK(body.contains("line"));

    res = cli.Post("/query", "SELECT * WHERE { ?s ?p ?o OPTIONAL { ?s ?q ?z } }", "application/sparql-query");
    REQUIRE(res);
    CHECK(res->status == 400);
    CHECK(nlohmann::json::parse(res->body)["feature"] == "OPTIONAL");

    res = cli.Post("/query", "SELECT * WHERE { ?r owl:sameAs ?u SERVICE <http://down.example/sparql> { ?u ?p ?o } }",
                   "application/sparql-query");
    REQUIRE(res);
    CHECK(res->status == 502);
    body = nlohmann::json::parse(res->body);
    CHECK(body["error"] == "ServiceError");
    CHECK(body["endpoint"] == "http://down.example/sparql");

    res = cli.Post("/query", "", "text/plain");
    REQUIRE(res);
    CHECK(res->status == 400);
}

TEST_CASE("federated query through the server") {
    Running r(fixture::query_world(1));
    auto cli = r.client();
    auto res = cli.Post("/query",
                        "SELECT * WHERE { ?r owl:sameAs ?u . SERVICE <https://data.europa.eu/euodp/sparqlep> { ?u ?p ?o } } LIMIT 10",
                        "application/sparql-query");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(nlohmann::json::parse(res->body)["results"]["bindings"].size() == 5);
}

TEST_CASE("dataset download reloads to the same snapshot") {
    Running r(fixture::query_world(3));
    auto cli = r.client();
    auto res = cli.Get("/dataset.nt");
    REQUIRE(res);
    CHECK(res->status == 200);
    TripleStore reloaded;
    reloaded.load(res->body, rdf::Format::ntriples);
    CHECK(reloaded.dump_ntriples() == r.holder.current()->dump_ntriples());
}

TEST_CASE("render, regions and health") {
    Running r(fixture::query_world(1));
    auto cli = r.client();
    const nlohmann::json request = {
        {"query", "SELECT ?r ?wkt ?lvl WHERE { ?r geosparql:hasGeometry/geosparql:asWKT ?wkt ; nuts:level ?lvl }"},
        {"colorVariable", "lvl"}};
    auto res = cli.Post("/render", request.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    const auto fc = nlohmann::json::parse(res->body);
    CHECK(fc["features"].size() == 6);

    const nlohmann::json with_results = {
        {"results", {{"head", {{"vars", {"n"}}}}, {"results", {{"bindings", nlohmann::json::array()}}}}},
        {"colorVariable", "n"}};
    res = cli.Post("/render", with_results.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);

    res = cli.Post("/render", "{\"colorVariable\": 3}", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    CHECK(nlohmann::json::parse(res->body)["error"] == "RenderError");

    res = cli.Get("/regions.geojson");
    REQUIRE(res);
    CHECK(nlohmann::json::parse(res->body)["features"].size() == 6);

    res = cli.Get("/health");
    REQUIRE(res);
    CHECK(nlohmann::json::parse(res->body)["triples"] == r.holder.current()->size());
}

TEST_CASE("requests see the snapshot current at their start") {
    Running r(fixture::query_world(1));
    auto cli = r.client();
    const auto count = [&] {
        auto res = cli.Get("/health");
        return nlohmann::json::parse(res->body)["triples"].get<std::size_t>();
    };
    const auto before = count();
    r.holder.publish(fixture::store_of(fixture::query_world(2)));
    CHECK(count() > before);
}

TEST_CASE("handler logic without transport") {
    auto st = fixture::store_of(fixture::query_world(1));
    fixture::DownServiceClient down;
    CHECK(handle_query(*st, "SELECT * WHERE { ?s ?p ?o } LIMIT 1", "", nullptr).status == 200);
    CHECK(handle_query(*st, "SELECT * WHERE { SERVICE <http://x.org/s> { ?s ?p ?o } }", "", &down).status == 502);
    CHECK(handle_query(*st, "nonsense", "", nullptr).status == 400);
    CHECK(handle_render(*st, "not json", nullptr).status == 400);
}
