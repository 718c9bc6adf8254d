#include "covkg/analysis.hpp"
#include "covkg/errors.hpp"
#include "covkg/federation.hpp"
#include "covkg/server.hpp"
#include "covkg/service.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <thread>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

using namespace covkg;

namespace {

service::Server* g_server = nullptr;

void on_signal(int) {
    if (g_server) g_server->stop();
}

Date today_utc() {
    return utc_day(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

int serve(const std::string& config_path, const std::string& bind_override, bool schedule) {
    auto cfg = service::load_deployment(config_path);
    if (!bind_override.empty()) {
        const auto colon = bind_override.rfind(':');
        cfg.bind_host = bind_override.substr(0, colon);
        cfg.bind_port = std::stoi(bind_override.substr(colon + 1));
    }

    SnapshotHolder holder;
    const bool have_snapshot = !cfg.snapshot.empty() && std::filesystem::exists(cfg.snapshot);
    if (have_snapshot) {
        holder.publish(service::load_snapshot(cfg.snapshot));
        spdlog::info("serving persisted snapshot {} ({} triples)", cfg.snapshot.string(), holder.current()->size());
    }

    sparql::HttpServiceClient::Options client_options;
    client_options.timeout = cfg.service_timeout;
    client_options.rewrites = cfg.endpoint_rewrites;
    sparql::HttpServiceClient client(client_options);

    auto job = [&](Date today) {
        try {
            const auto report = service::run_pipeline(cfg, today, holder);
            spdlog::info("pipeline: {}", report.to_json().dump());
        } catch (const Error& e) {
            spdlog::error("pipeline failed: {}", e.what());
        }
    };

    std::thread initial;
    if (!have_snapshot) initial = std::thread([&] { job(today_utc()); });
    service::Scheduler scheduler(cfg.schedule_utc, job);
    if (schedule) scheduler.start();

    service::Server server(holder, {&client});
    if (!server.bind(cfg.bind_host, cfg.bind_port)) {
        spdlog::error("cannot bind {}:{}", cfg.bind_host, cfg.bind_port);
        if (initial.joinable()) initial.join();
        return 1;
    }
    g_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    spdlog::info("listening on {}:{}", cfg.bind_host, cfg.bind_port);
    server.listen();
    g_server = nullptr;
    scheduler.stop();
    if (initial.joinable()) initial.join();
    return 0;
}

int run_once(const std::string& config_path, const std::string& today_text, const std::string& snapshot,
             const std::string& rejects) {
    auto cfg = service::load_deployment(config_path);
    if (!snapshot.empty()) cfg.snapshot = snapshot;
    if (!rejects.empty()) cfg.rejects_dir = rejects;
    const Date today = today_text.empty() ? today_utc() : parse_date(today_text);

    SnapshotHolder holder;
    if (!cfg.snapshot.empty() && std::filesystem::exists(cfg.snapshot)) holder.publish(service::load_snapshot(cfg.snapshot));
    try {
        const auto report = service::run_pipeline(cfg, today, holder);
        std::cout << report.to_json().dump(2) << '\n';
        return 0;
    } catch (const PipelineError& e) {
        spdlog::error("{}", e.what());
        return 2;
    }
}

int analyze_correlations(const std::string& snapshot, const std::string& config_path, bool delta, std::size_t min_days,
                         const std::string& format) {
    std::filesystem::path path = snapshot;
    if (path.empty()) {
        if (config_path.empty()) throw ConfigError("give --snapshot or --config");
        path = service::load_deployment(config_path).snapshot;
    }
    const auto store = service::load_snapshot(path);
    const auto entries = analysis::correlation_table(*store, {delta, min_days});
    std::cout << (format == "table" ? analysis::to_table(entries) : analysis::to_csv(entries));
    return 0;
}

int query(const std::string& snapshot, const std::string& text, const std::string& format) {
    const auto store = service::load_snapshot(snapshot);
    sparql::HttpServiceClient client;
    const auto r = service::handle_query(*store, text, format == "csv" ? "text/csv" : "", &client);
    std::cout << r.body;
    if (format != "csv") std::cout << '\n';
    return r.status == 200 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Regional COVID-19 knowledge graph: ingest, query, analyze"};
    app.require_subcommand(1);
    std::string log_level = "info";
    app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");

    std::string config;
    std::string bind;
    bool no_schedule = false;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the SPARQL endpoint and run the daily pipeline");
    serve_cmd->add_option("--config", config, "Deployment config JSON")->required()->check(CLI::ExistingFile);
    serve_cmd->add_option("--bind", bind, "host:port, overrides the config");
    serve_cmd->add_flag("--no-schedule", no_schedule, "Do not run the daily scheduler");

    std::string today;
    std::string snapshot;
    std::string rejects;
    auto* run_cmd = app.add_subcommand("run-once", "Run the pipeline once and persist the snapshot");
    run_cmd->add_option("--config", config, "Deployment config JSON")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--today", today, "UTC date treated as today (YYYY-MM-DD)");
    run_cmd->add_option("--snapshot", snapshot, "Snapshot path, overrides the config");
    run_cmd->add_option("--rejects", rejects, "Rejects directory, overrides the config");

    auto* analyze_cmd = app.add_subcommand("analyze", "Analyses over a snapshot");
    analyze_cmd->require_subcommand(1);
    auto* corr_cmd = analyze_cmd->add_subcommand("correlations", "Pearson correlation of adjacent cross-border regions");
    bool delta = false;
    std::size_t min_days = 2;
    std::string format = "csv";
    corr_cmd->add_option("--snapshot", snapshot, "N-Triples snapshot");
    corr_cmd->add_option("--config", config, "Deployment config (its snapshot is used)");
    corr_cmd->add_flag("--delta", delta, "Correlate day-over-day differences");
    corr_cmd->add_option("--min-days", min_days, "Minimum number of aligned days")->check(CLI::PositiveNumber);
    corr_cmd->add_option("--format", format, "csv or table")->check(CLI::IsMember({"csv", "table"}));

    std::string query_text;
    std::string query_format = "json";
    auto* query_cmd = app.add_subcommand("query", "Evaluate one query against a snapshot");
    query_cmd->add_option("--snapshot", snapshot, "N-Triples snapshot")->required()->check(CLI::ExistingFile);
    query_cmd->add_option("query", query_text, "Query text")->required();
    query_cmd->add_option("--format", query_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    CLI11_PARSE(app, argc, argv);
    spdlog::set_default_logger(spdlog::stderr_color_mt("covkg"));
    spdlog::set_level(spdlog::level::from_str(log_level));

    try {
        if (*serve_cmd) return serve(config, bind, !no_schedule);
        if (*run_cmd) return run_once(config, today, snapshot, rejects);
        if (*corr_cmd) return analyze_correlations(snapshot, config, delta, min_days, format);
        if (*query_cmd) return query(snapshot, query_text, query_format);
    } catch (const Error& e) {
        std::cerr << e.kind() << ": " << e.what() << '\n';
        return 1;
    }
    return 0;
}
