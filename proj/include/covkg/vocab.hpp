#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

/// Ontology vocabulary. Prefixes follow the published query listings.
namespace covkg::vocab {

inline constexpr std::string_view kCov = "http://ai-group.ds.unipi.gr/covid-19#";
inline constexpr std::string_view kNuts = "http://nuts.geovocab.org/id/";
inline constexpr std::string_view kGeo = "http://www.opengis.net/ont/geosparql#";
inline constexpr std::string_view kTime = "http://www.w3.org/2006/time#";
inline constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kFunctions = "java:SPARQL_functions.";

/// Base for minted report and instant IRIs.
inline constexpr std::string_view kDataBase = "http://ai-group.ds.unipi.gr/covid-19";

inline constexpr std::string_view DailyReport = "http://ai-group.ds.unipi.gr/covid-19#DailyReport";
inline constexpr std::string_view hasSpatialFeature = "http://ai-group.ds.unipi.gr/covid-19#hasSpatialFeature";
inline constexpr std::string_view infected = "http://ai-group.ds.unipi.gr/covid-19#infected";
inline constexpr std::string_view hasTotalPopulation = "http://ai-group.ds.unipi.gr/covid-19#hasTotalPopulation";
inline constexpr std::string_view PopulationPerSQKm = "http://ai-group.ds.unipi.gr/covid-19#PopulationPerSQKm";
inline constexpr std::string_view populationGrpLE19 = "http://ai-group.ds.unipi.gr/covid-19#populationGrpLE19";
inline constexpr std::string_view populationGrp20_39 = "http://ai-group.ds.unipi.gr/covid-19#populationGrp20_39";
inline constexpr std::string_view populationGrp40_59 = "http://ai-group.ds.unipi.gr/covid-19#populationGrp40_59";
inline constexpr std::string_view populationGrpGE60 = "http://ai-group.ds.unipi.gr/covid-19#populationGrpGE60";
inline constexpr std::string_view hasPart = "http://ai-group.ds.unipi.gr/covid-19#hasPart";

inline constexpr std::string_view GeographicalRegion = "http://nuts.geovocab.org/id/GeographicalRegion";
inline constexpr std::string_view code = "http://nuts.geovocab.org/id/code";
inline constexpr std::string_view name = "http://nuts.geovocab.org/id/name";
inline constexpr std::string_view level = "http://nuts.geovocab.org/id/level";

inline constexpr std::string_view Feature = "http://www.opengis.net/ont/geosparql#Feature";
inline constexpr std::string_view Geometry = "http://www.opengis.net/ont/geosparql#Geometry";
inline constexpr std::string_view hasGeometry = "http://www.opengis.net/ont/geosparql#hasGeometry";
inline constexpr std::string_view asWKT = "http://www.opengis.net/ont/geosparql#asWKT";
inline constexpr std::string_view wktLiteral = "http://www.opengis.net/ont/geosparql#wktLiteral";

inline constexpr std::string_view has_time = "http://www.w3.org/2006/time#has_time";
inline constexpr std::string_view inXSDDateTimeStamp = "http://www.w3.org/2006/time#inXSDDateTimeStamp";
inline constexpr std::string_view Instant = "http://www.w3.org/2006/time#Instant";

inline constexpr std::string_view sameAs = "http://www.w3.org/2002/07/owl#sameAs";
inline constexpr std::string_view type = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view langString = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";

inline constexpr std::string_view xsd_string = "http://www.w3.org/2001/XMLSchema#string";
inline constexpr std::string_view xsd_integer = "http://www.w3.org/2001/XMLSchema#integer";
inline constexpr std::string_view xsd_decimal = "http://www.w3.org/2001/XMLSchema#decimal";
inline constexpr std::string_view xsd_double = "http://www.w3.org/2001/XMLSchema#double";
inline constexpr std::string_view xsd_boolean = "http://www.w3.org/2001/XMLSchema#boolean";
inline constexpr std::string_view xsd_dateTimeStamp = "http://www.w3.org/2001/XMLSchema#dateTimeStamp";
inline constexpr std::string_view xsd_dateTime = "http://www.w3.org/2001/XMLSchema#dateTime";

inline constexpr std::string_view touches_function = "java:SPARQL_functions.touches";

/// Prefix label (without colon, "" for the default prefix) to namespace.
using PrefixMap = std::map<std::string, std::string, std::less<>>;

/// cov (also bound to the empty prefix), nuts, geosparql, time, owl, rdf,
/// rdfs, xsd and f.
const PrefixMap& standard_prefixes();

struct Entry {
    std::string_view prefixed;
    std::string_view iri;
};

/// Every ontology term above with its prefixed name.
std::span<const Entry> entries();

/// "cov:infected" -> full IRI using the standard prefixes.
std::optional<std::string> expand(std::string_view prefixed);

/// Full IRI -> "prefix:local" using the standard prefixes (longest namespace
/// wins, the named `cov` prefix is preferred over the empty one).
std::optional<std::string> compact(std::string_view iri);

} // namespace covkg::vocab
