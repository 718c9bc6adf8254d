#pragma once

#include "covkg/model.hpp"
#include "covkg/rdf.hpp"
#include "covkg/sparql.hpp"
#include "covkg/store.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace fixture {

using covkg::rdf::Term;
using covkg::rdf::Triple;

std::filesystem::path source_dir();

/// Fresh, empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& content);

Term iri(std::string_view s);
Term nuts(std::string_view code);
Term cov(std::string_view local);
Term str(std::string_view s);

covkg::Region region(std::string_view code, std::optional<covkg::geo::Geometry> geometry = std::nullopt);

/// Four countries (AT, DE, FR, IT) and six level-3 unit-ish squares:
///
///   ITC11 [0,.5]x[1,2]
///   AT111 [0,1]x[0,1]  AT130 [1,2]x[0,1]  DE111 [2,3]x[0,1]  FRF31 [3,4]x[0,1]  FRF32 [4,5]x[0,1]
///
/// Cross-border touching pairs: AT111-ITC11, AT130-DE111, DE111-FRF31.
std::vector<covkg::Region> world_regions();

/// Region description triples: code, name, level, geometry and the country
/// hasPart link, matching the shape the query listings expect.
std::vector<Triple> region_triples(const std::vector<covkg::Region>& regions);

/// Reports expanded through the shipped template.
std::vector<Triple> report_triples(const std::vector<covkg::DailyReport>& reports);

/// Deterministic reports for the six world regions on `days` days from
/// 2020-03-01.
std::vector<covkg::DailyReport> world_reports(int days);

/// owl:sameAs links from AT130, ITC11 and DE111 to remote resources.
std::vector<Triple> same_as_triples();

/// World regions, `days` days of reports and the sameAs links.
std::vector<Triple> query_world(int days);

inline const std::string kEuodp = "https://data.europa.eu/euodp/sparqlep";
inline const std::string kWikidata = "https://query.wikidata.org/sparql";
inline const std::string kFactForge = "http://factforge.net/repositories/ff-news";

std::vector<Triple> euodp_triples();
std::vector<Triple> wikidata_triples();
std::vector<Triple> factforge_triples();

std::shared_ptr<covkg::TripleStore> store_of(const std::vector<Triple>& triples);

/// Answers SERVICE requests by parsing the query text and evaluating it over
/// an in-memory store per endpoint. Unknown endpoints fail.
class StoreServiceClient : public covkg::sparql::ServiceClient {
public:
    void add(const std::string& endpoint, const std::vector<Triple>& triples);
    covkg::sparql::ResultSet select(const std::string& endpoint, const std::string& query) override;

    std::vector<std::pair<std::string, std::string>> requests;

private:
    std::map<std::string, std::shared_ptr<covkg::TripleStore>> stores_;
};

/// Every request fails like an unreachable endpoint.
class DownServiceClient : public covkg::sparql::ServiceClient {
public:
    covkg::sparql::ResultSet select(const std::string& endpoint, const std::string& query) override;
};

/// Returns a fixed result set for every request.
class CannedServiceClient : public covkg::sparql::ServiceClient {
public:
    explicit CannedServiceClient(covkg::sparql::ResultSet rs) : rs_(std::move(rs)) {}
    covkg::sparql::ResultSet select(const std::string& endpoint, const std::string& query) override;
    std::vector<std::string> queries;

private:
    covkg::sparql::ResultSet rs_;
};

/// `n` distinct triples mixing IRIs, blank nodes, plain, typed and
/// language-tagged literals with escapes and non-ASCII text.
std::vector<Triple> random_triples(std::size_t n, unsigned seed);

} // namespace fixture
