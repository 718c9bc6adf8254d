#pragma once

#include "covkg/rdf.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace covkg {

struct TermHash {
    std::size_t operator()(const rdf::Term& t) const noexcept;
};

/// In-memory triple set over interned term ids with SPO, POS and OSP
/// indexes. Insertion is idempotent. Not synchronized: build a store on one
/// thread, then share it read-only (see SnapshotHolder).
class TripleStore {
public:
    using Id = std::uint32_t;

    enum class Index { spo, pos, osp };

    /// True when the triple was not yet present.
    bool insert(const rdf::Triple& triple);

    /// Parses the whole document before inserting anything; throws LoadError
    /// and leaves the store untouched on failure. Returns the count added.
    std::size_t load(std::string_view document, rdf::Format format);

    std::size_t size() const noexcept { return spo_.size(); }
    bool contains(const rdf::Triple& triple) const;

    /// Triples matching every bound position.
    std::vector<rdf::Triple> match(const std::optional<rdf::Term>& s = std::nullopt,
                                   const std::optional<rdf::Term>& p = std::nullopt,
                                   const std::optional<rdf::Term>& o = std::nullopt) const;

    /// All triples in SPO id order.
    std::vector<rdf::Triple> triples() const;

    /// Sorted N-Triples lines; identical triple sets give identical bytes.
    std::string dump_ntriples() const;

    /// Index whose key prefix covers the most bound positions.
    static Index choose_index(bool s_bound, bool p_bound, bool o_bound) noexcept;

    /// True when the three indexes hold the same triple set.
    bool indexes_consistent() const;

    // Id-level access for the query engine.
    std::optional<Id> find_id(const rdf::Term& term) const;
    const rdf::Term& term(Id id) const { return terms_.at(id); }
    std::size_t term_count() const noexcept { return terms_.size(); }

    /// Calls `visit(s, p, o)` for every match. Ids unknown to this store
    /// simply match nothing.
    void scan(std::optional<Id> s, std::optional<Id> p, std::optional<Id> o,
              const std::function<void(Id, Id, Id)>& visit) const;

private:
    using Key = std::array<Id, 3>;

    Id intern(const rdf::Term& term);

    std::vector<rdf::Term> terms_;
    std::unordered_map<rdf::Term, Id, TermHash> ids_;
    std::set<Key> spo_; // {s, p, o}
    std::set<Key> pos_; // {p, o, s}
    std::set<Key> osp_; // {o, s, p}
};

/// Holds the served snapshot. Readers get a shared immutable store; the
/// writer publishes a complete replacement in one step.
class SnapshotHolder {
public:
    SnapshotHolder() : current_(std::make_shared<const TripleStore>()) {}

    std::shared_ptr<const TripleStore> current() const {
        std::lock_guard lock(mutex_);
        return current_;
    }

    void publish(std::shared_ptr<const TripleStore> next) {
        std::lock_guard lock(mutex_);
        current_ = std::move(next);
    }

private:
    mutable std::mutex mutex_;
    std::shared_ptr<const TripleStore> current_;
};

} // namespace covkg
