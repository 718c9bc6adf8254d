#include "covkg/store.hpp"

#include <algorithm>
#include <limits>

namespace covkg {

std::size_t TermHash::operator()(const rdf::Term& t) const noexcept {
    std::size_t h = std::hash<std::string>{}(t.value());
    h ^= std::hash<std::string>{}(t.datatype()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= std::hash<std::string>{}(t.lang()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h ^ static_cast<std::size_t>(t.kind());
}

TripleStore::Id TripleStore::intern(const rdf::Term& term) {
    auto [it, inserted] = ids_.try_emplace(term, static_cast<Id>(terms_.size()));
    if (inserted) terms_.push_back(term);
    return it->second;
}

bool TripleStore::insert(const rdf::Triple& triple) {
    const Id s = intern(triple.subject);
    const Id p = intern(triple.predicate);
    const Id o = intern(triple.object);
    if (!spo_.insert({s, p, o}).second) return false;
    pos_.insert({p, o, s});
    osp_.insert({o, s, p});
    return true;
}

std::size_t TripleStore::load(std::string_view document, rdf::Format format) {
    const auto parsed = rdf::parse(document, format);
    std::size_t added = 0;
    for (const auto& t : parsed) added += insert(t) ? 1 : 0;
    return added;
}

bool TripleStore::contains(const rdf::Triple& triple) const {
    const auto s = find_id(triple.subject);
    const auto p = find_id(triple.predicate);
    const auto o = find_id(triple.object);
    return s && p && o && spo_.count({*s, *p, *o}) > 0;
}

std::optional<TripleStore::Id> TripleStore::find_id(const rdf::Term& term) const {
    auto it = ids_.find(term);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

TripleStore::Index TripleStore::choose_index(bool s, bool p, bool o) noexcept {
    if (s && !p && o) return Index::osp;
    if (s) return Index::spo;
    if (p) return Index::pos;
    if (o) return Index::osp;
    return Index::spo;
}

void TripleStore::scan(std::optional<Id> s, std::optional<Id> p, std::optional<Id> o,
                       const std::function<void(Id, Id, Id)>& visit) const {
    const Index index = choose_index(s.has_value(), p.has_value(), o.has_value());
    const std::set<Key>* keys = nullptr;
    Key probe{};
    std::size_t prefix = 0;

    // Bound positions in index key order; the chosen index makes them a prefix.
    std::array<std::optional<Id>, 3> ordered;
    switch (index) {
    case Index::spo: keys = &spo_; ordered = {s, p, o}; break;
    case Index::pos: keys = &pos_; ordered = {p, o, s}; break;
    case Index::osp: keys = &osp_; ordered = {o, s, p}; break;
    }
    while (prefix < 3 && ordered[prefix]) {
        probe[prefix] = *ordered[prefix];
        ++prefix;
    }
    for (std::size_t i = prefix; i < 3; ++i) probe[i] = 0;

    for (auto it = keys->lower_bound(probe); it != keys->end(); ++it) {
        const Key& k = *it;
        if (!std::equal(k.begin(), k.begin() + static_cast<long>(prefix), probe.begin())) break;
        Id ts = 0, tp = 0, to = 0;
        switch (index) {
        case Index::spo: ts = k[0]; tp = k[1]; to = k[2]; break;
        case Index::pos: tp = k[0]; to = k[1]; ts = k[2]; break;
        case Index::osp: to = k[0]; ts = k[1]; tp = k[2]; break;
        }
        // Positions bound but outside the prefix still need checking.
        if ((s && *s != ts) || (p && *p != tp) || (o && *o != to)) continue;
        visit(ts, tp, to);
    }
}

std::vector<rdf::Triple> TripleStore::match(const std::optional<rdf::Term>& s, const std::optional<rdf::Term>& p,
                                            const std::optional<rdf::Term>& o) const {
    std::vector<rdf::Triple> out;
    std::optional<Id> sid, pid, oid;
    if (s && !(sid = find_id(*s))) return out;
    if (p && !(pid = find_id(*p))) return out;
    if (o && !(oid = find_id(*o))) return out;
    scan(sid, pid, oid, [&](Id a, Id b, Id c) { out.push_back({terms_[a], terms_[b], terms_[c]}); });
    return out;
}

std::vector<rdf::Triple> TripleStore::triples() const {
    return match();
}

std::string TripleStore::dump_ntriples() const {
    std::vector<std::string> lines;
    lines.reserve(spo_.size());
    for (const auto& k : spo_) {
        lines.push_back(rdf::to_ntriples(terms_[k[0]]) + ' ' + rdf::to_ntriples(terms_[k[1]]) + ' ' +
                        rdf::to_ntriples(terms_[k[2]]) + " .\n");
    }
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines) out += l;
    return out;
}

bool TripleStore::indexes_consistent() const {
    if (spo_.size() != pos_.size() || spo_.size() != osp_.size()) return false;
    for (const auto& k : spo_) {
        if (!pos_.count({k[1], k[2], k[0]}) || !osp_.count({k[2], k[0], k[1]})) return false;
    }
    return true;
}

} // namespace covkg
