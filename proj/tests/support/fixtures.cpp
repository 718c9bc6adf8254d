#include "fixtures.hpp"

#include "covkg/errors.hpp"
#include "covkg/rdfgen.hpp"
#include "covkg/vocab.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace fixture {

namespace cv = covkg::vocab;
namespace fs = std::filesystem;

fs::path source_dir() {
    return COVKG_SOURCE_DIR;
}

fs::path temp_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    fs::path dir = fs::temp_directory_path() / fmt::format("covkg-{}-{}-{}", tag, stamp, counter++);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
}

Term iri(std::string_view s) {
    return Term::iri(s);
}

Term nuts(std::string_view code) {
    return Term::iri(std::string(cv::kNuts) + std::string(code));
}

Term cov(std::string_view local) {
    return Term::iri(std::string(cv::kCov) + std::string(local));
}

Term str(std::string_view s) {
    return Term::literal(s);
}

covkg::Region region(std::string_view code, std::optional<covkg::geo::Geometry> geometry) {
    const auto c = covkg::NutsCode::parse(code);
    return covkg::Region{c, {{"", std::string(code)}}, std::move(geometry), c.parent(), {}, {}, {}, {}, {}, {}};
}

std::vector<covkg::Region> world_regions() {
    using covkg::geo::Geometry;
    std::vector<covkg::Region> out;
    for (const char* c : {"AT", "DE", "FR", "IT"}) out.push_back(region(c));
    out.push_back(region("AT111", Geometry::rectangle(0, 0, 1, 1)));
    out.push_back(region("AT130", Geometry::rectangle(1, 0, 2, 1)));
    out.push_back(region("DE111", Geometry::rectangle(2, 0, 3, 1)));
    out.push_back(region("FRF31", Geometry::rectangle(3, 0, 4, 1)));
    out.push_back(region("FRF32", Geometry::rectangle(4, 0, 5, 1)));
    out.push_back(region("ITC11", Geometry::rectangle(0, 1, 0.5, 2)));
    return out;
}

std::vector<Triple> region_triples(const std::vector<covkg::Region>& regions) {
    std::vector<Triple> out;
    for (const auto& r : regions) {
        const Term s = nuts(r.code.str());
        out.push_back({s, iri(cv::code), str(r.code.str())});
        out.push_back({s, iri(cv::name), str(r.label())});
        out.push_back({s, iri(cv::level), str(std::to_string(r.level()))});
        if (r.geometry) {
            const Term g = nuts(r.code.str() + "_geometry");
            out.push_back({s, iri(cv::hasGeometry), g});
            out.push_back({g, iri(cv::asWKT), Term::literal(covkg::geo::to_wkt(*r.geometry), cv::wktLiteral)});
        }
        if (r.level() > 0) {
            const auto country = *r.code.ancestor_at(0);
            out.push_back({nuts(country.str()), iri(cv::hasPart), s});
        }
    }
    return out;
}

std::vector<Triple> report_triples(const std::vector<covkg::DailyReport>& reports) {
    static const auto tpl = covkg::rdfgen::load_template(source_dir() / "data/templates/covid.tpl");
    std::vector<Triple> out;
    for (const auto& r : reports) {
        for (auto& t : covkg::rdfgen::expand(tpl, r)) out.push_back(std::move(t));
    }
    return out;
}

std::vector<covkg::DailyReport> world_reports(int days) {
    std::vector<covkg::DailyReport> out;
    const auto first = covkg::parse_date("2020-03-01");
    int i = 0;
    for (const auto& r : world_regions()) {
        if (r.level() != 3) continue;
        for (int d = 0; d < days; ++d) {
            out.push_back({r.code, first + std::chrono::days(d), (i + 1) * (d + 1) + (i * 7 + d * 3) % 5});
        }
        ++i;
    }
    return out;
}

std::vector<Triple> same_as_triples() {
    const Term same = iri(cv::sameAs);
    return {
        {nuts("AT130"), same, iri("http://data.europa.eu/nuts/code/AT130")},
        {nuts("AT130"), same, iri("http://www.wikidata.org/entity/Q1741")},
        {nuts("ITC11"), same, iri("http://data.europa.eu/nuts/code/ITC11")},
        {nuts("DE111"), same, iri("http://www.wikidata.org/entity/Q1022")},
    };
}

std::vector<Triple> query_world(int days) {
    auto out = region_triples(world_regions());
    for (auto& t : report_triples(world_reports(days))) out.push_back(std::move(t));
    for (auto& t : same_as_triples()) out.push_back(std::move(t));
    return out;
}

std::vector<Triple> euodp_triples() {
    const Term at = iri("http://data.europa.eu/nuts/code/AT130");
    const Term it = iri("http://data.europa.eu/nuts/code/ITC11");
    const Term label = iri("http://www.w3.org/2004/02/skos/core#prefLabel");
    const Term notation = iri("http://www.w3.org/2004/02/skos/core#notation");
    const Term type = iri(cv::type);
    const Term concept_iri = iri("http://www.w3.org/2004/02/skos/core#Concept");
    return {
        {at, label, Term::lang_literal("Wien", "de")},
        {at, notation, str("AT130")},
        {at, type, concept_iri},
        {it, label, Term::lang_literal("Torino", "it")},
        {it, notation, str("ITC11")},
        {iri("http://data.europa.eu/nuts/code/BE34"), notation, str("BE34")},
    };
}

std::vector<Triple> wikidata_triples() {
    const Term vienna = iri("http://www.wikidata.org/entity/Q1741");
    const Term label = iri("http://www.w3.org/2000/01/rdf-schema#label");
    return {
        {vienna, label, Term::lang_literal("Vienna", "en")},
        {vienna, iri("http://www.wikidata.org/prop/direct/P1082"), Term::integer(1897491)},
        {iri("http://www.wikidata.org/entity/Q1022"), label, Term::lang_literal("Stuttgart", "en")},
        {iri("http://www.wikidata.org/entity/Q64"), label, Term::lang_literal("Berlin", "en")},
    };
}

std::vector<Triple> factforge_triples() {
    const Term vienna = iri("http://factforge.net/resource/Vienna");
    const Term exact = iri("http://ontology.ontotext.com/taxonomy/exactMatch");
    return {
        {vienna, exact, iri("http://www.wikidata.org/entity/Q1741")},
        {vienna, iri("http://www.w3.org/2000/01/rdf-schema#label"), Term::lang_literal("Wien", "de")},
        {vienna, iri("http://ontology.ontotext.com/taxonomy/mentionedIn"), iri("http://factforge.net/news/1")},
        {iri("http://factforge.net/resource/Berlin"), exact, iri("http://www.wikidata.org/entity/Q64")},
    };
}

std::shared_ptr<covkg::TripleStore> store_of(const std::vector<Triple>& triples) {
    auto s = std::make_shared<covkg::TripleStore>();
    for (const auto& t : triples) s->insert(t);
    return s;
}

void StoreServiceClient::add(const std::string& endpoint, const std::vector<Triple>& triples) {
    stores_[endpoint] = store_of(triples);
}

covkg::sparql::ResultSet StoreServiceClient::select(const std::string& endpoint, const std::string& query) {
    requests.emplace_back(endpoint, query);
    auto it = stores_.find(endpoint);
    if (it == stores_.end()) throw covkg::ServiceError(endpoint, "connection refused");
    try {
        return covkg::sparql::evaluate(covkg::sparql::parse_query(query), *it->second);
    } catch (const covkg::Error& e) {
        throw covkg::ServiceError(endpoint, std::string("remote error: ") + e.what());
    }
}

covkg::sparql::ResultSet DownServiceClient::select(const std::string& endpoint, const std::string&) {
    throw covkg::ServiceError(endpoint, "connection refused");
}

covkg::sparql::ResultSet CannedServiceClient::select(const std::string&, const std::string& query) {
    queries.push_back(query);
    return rs_;
}

std::vector<Triple> random_triples(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    auto pick = [&](int k) { return static_cast<int>(rng() % static_cast<unsigned>(k)); };
    static const std::vector<std::string> words = {"Wien", "Liège", "Île-de-France", "Ελλάδα", "Göteborg", "quote\"d",
                                                   "back\\slash", "line\nbreak", "tab\there", "", "x", "München"};
    static const std::vector<std::string> datatypes = {std::string(cv::xsd_integer), std::string(cv::xsd_decimal),
                                                       std::string(cv::xsd_dateTimeStamp), std::string(cv::wktLiteral),
                                                       std::string(cv::xsd_boolean)};
    auto literal = [&](int i) -> Term {
        switch (pick(5)) {
        case 0: return Term::literal(words[pick(static_cast<int>(words.size()))] + std::to_string(i));
        case 1: return Term::lang_literal(words[pick(static_cast<int>(words.size()))], pick(2) ? "de" : "en-GB");
        case 2: return Term::integer(static_cast<std::int64_t>(rng() % 100000) - 50000);
        case 3: {
            const auto& dt = datatypes[pick(static_cast<int>(datatypes.size()))];
            if (dt == cv::xsd_boolean) return Term::literal(pick(2) ? "true" : "false", dt);
            if (dt == cv::xsd_decimal) return Term::literal(fmt::format("{}.{}", pick(1000), pick(100)), dt);
            if (dt == cv::xsd_dateTimeStamp) return Term::literal(fmt::format("2020-03-{:02}T00:00:00Z", 1 + pick(28)), dt);
            if (dt == cv::wktLiteral) return Term::literal(fmt::format("POINT ({} {})", pick(50), pick(50)), dt);
            return Term::literal(std::to_string(pick(1000)), dt);
        }
        default: return Term::literal(fmt::format("custom {}", i), "http://example.org/dt#custom");
        }
    };
    auto resource = [&]() -> Term {
        switch (pick(4)) {
        case 0: return Term::blank(fmt::format("b{}", pick(40)));
        case 1: return nuts(fmt::format("AT{}", 100 + pick(60)));
        case 2: return cov(fmt::format("report/{}", pick(80)));
        default: return iri(fmt::format("http://example.org/r%C3%A9gion/{}", pick(50)));
        }
    };
    std::set<Triple> seen;
    std::vector<Triple> out;
    int i = 0;
    while (out.size() < n) {
        const Term s = resource();
        const Term p = pick(5) == 0 ? iri(cv::type) : cov(fmt::format("p{}", pick(12)));
        const Term o = pick(2) ? literal(i) : resource();
        ++i;
        Triple t{s, p, o};
        if (seen.insert(t).second) out.push_back(std::move(t));
    }
    return out;
}

} // namespace fixture
