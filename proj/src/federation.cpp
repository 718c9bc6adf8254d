#include "covkg/federation.hpp"

#include "covkg/errors.hpp"

#include <httplib.h>
#include <json.hpp>

#include <charconv>

namespace covkg::sparql {

Url split_url(std::string_view url) {
    Url out;
    const auto sep = url.find("://");
    if (sep == std::string_view::npos) throw ValidationError("not an absolute URL: " + std::string(url));
    out.scheme = std::string(url.substr(0, sep));
    if (out.scheme != "http" && out.scheme != "https") {
        throw ValidationError("unsupported URL scheme '" + out.scheme + "'");
    }
    const std::string rest(url.substr(sep + 3));
    const auto slash = rest.find('/');
    std::string_view authority = std::string_view(rest).substr(0, slash);
    out.path = slash == std::string::npos ? "/" : rest.substr(slash);
    out.port = out.scheme == "https" ? 443 : 80;
    if (const auto colon = authority.rfind(':'); colon != std::string_view::npos && authority.back() != ']') {
        const auto digits = authority.substr(colon + 1);
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), out.port);
        if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
            throw ValidationError("bad port in URL: " + std::string(url));
        }
        authority = authority.substr(0, colon);
    }
    if (authority.empty()) throw ValidationError("URL has no host: " + std::string(url));
    out.host = std::string(authority);
    return out;
}

ResultSet HttpServiceClient::select(const std::string& endpoint, const std::string& query) {
    auto rewrite = options_.rewrites.find(endpoint);
    const std::string& target = rewrite == options_.rewrites.end() ? endpoint : rewrite->second;

    Url url;
    try {
        url = split_url(target);
    } catch (const ValidationError& e) {
        throw ServiceError(endpoint, e.what());
    }

    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - seconds);
    httplib::Client client(url.scheme + "://" + url.host + ":" + std::to_string(url.port));
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());
    client.set_follow_location(true);

    httplib::Headers headers{{"Accept", "application/sparql-results+json"}};
    httplib::Params params{{"query", query}};
    auto res = client.Post(url.path, headers, params);
    if (!res) throw ServiceError(endpoint, "request failed: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300) {
        throw ServiceError(endpoint, "HTTP status " + std::to_string(res->status));
    }
    try {
        return results_from_json(nlohmann::json::parse(res->body));
    } catch (const nlohmann::json::exception& e) {
        throw ServiceError(endpoint, std::string("response is not JSON: ") + e.what());
    } catch (const ValidationError& e) {
        throw ServiceError(endpoint, e.what());
    }
}

} // namespace covkg::sparql
