#include "covkg/vocab.hpp"

#include <array>

namespace covkg::vocab {

const PrefixMap& standard_prefixes() {
    static const PrefixMap prefixes{
        {"", std::string(kCov)},           {"cov", std::string(kCov)},   {"nuts", std::string(kNuts)},
        {"geosparql", std::string(kGeo)},  {"time", std::string(kTime)}, {"owl", std::string(kOwl)},
        {"rdf", std::string(kRdf)},        {"rdfs", std::string(kRdfs)}, {"xsd", std::string(kXsd)},
        {"f", std::string(kFunctions)},
    };
    return prefixes;
}

std::span<const Entry> entries() {
    static constexpr std::array kEntries{
        Entry{"cov:DailyReport", DailyReport},
        Entry{"cov:hasSpatialFeature", hasSpatialFeature},
        Entry{"cov:infected", infected},
        Entry{"cov:hasTotalPopulation", hasTotalPopulation},
        Entry{"cov:PopulationPerSQKm", PopulationPerSQKm},
        Entry{"cov:populationGrpLE19", populationGrpLE19},
        Entry{"cov:populationGrp20_39", populationGrp20_39},
        Entry{"cov:populationGrp40_59", populationGrp40_59},
        Entry{"cov:populationGrpGE60", populationGrpGE60},
        Entry{"cov:hasPart", hasPart},
        Entry{"nuts:GeographicalRegion", GeographicalRegion},
        Entry{"nuts:code", code},
        Entry{"nuts:name", name},
        Entry{"nuts:level", level},
        Entry{"geosparql:Feature", Feature},
        Entry{"geosparql:Geometry", Geometry},
        Entry{"geosparql:hasGeometry", hasGeometry},
        Entry{"geosparql:asWKT", asWKT},
        Entry{"geosparql:wktLiteral", wktLiteral},
        Entry{"time:has_time", has_time},
        Entry{"time:inXSDDateTimeStamp", inXSDDateTimeStamp},
        Entry{"time:Instant", Instant},
        Entry{"owl:sameAs", sameAs},
        Entry{"rdf:type", type},
    };
    return kEntries;
}

std::optional<std::string> expand(std::string_view prefixed) {
    const auto colon = prefixed.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    const auto& prefixes = standard_prefixes();
    auto it = prefixes.find(prefixed.substr(0, colon));
    if (it == prefixes.end()) return std::nullopt;
    return it->second + std::string(prefixed.substr(colon + 1));
}

std::optional<std::string> compact(std::string_view iri) {
    const std::pair<const std::string, std::string>* best = nullptr;
    for (const auto& entry : standard_prefixes()) {
        if (entry.first.empty()) continue;
        if (iri.starts_with(entry.second) && (!best || entry.second.size() > best->second.size())) best = &entry;
    }
    if (!best) return std::nullopt;
    return best->first + ":" + std::string(iri.substr(best->second.size()));
}

} // namespace covkg::vocab
