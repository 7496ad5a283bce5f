#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mihkit/chain/address.hpp"
#include "mihkit/evidence/provenance.hpp"

namespace mihkit::clustering {

using chain::Address;

/// SHA-256 over the byte-wise sorted addresses joined by '\n' (no trailing
/// newline), lowercase hex. Input order does not matter. Throws InputError
/// on an empty list or duplicates.
std::string cluster_hash(std::span<const Address> addresses);

/// Content-derived cluster identifier: the cluster hash of its members.
class ClusterId {
public:
    ClusterId() = default;
    /// Throws InputError unless `digest` is 64 lowercase hex.
    explicit ClusterId(std::string digest);
    static ClusterId of(std::span<const Address> addresses) {
        return ClusterId(cluster_hash(addresses));
    }

    const std::string& str() const noexcept { return digest_; }

    friend bool operator==(const ClusterId&, const ClusterId&) = default;
    friend std::strong_ordering operator<=>(const ClusterId& a, const ClusterId& b) noexcept {
        return a.digest_.compare(b.digest_) <=> 0;
    }

private:
    std::string digest_;
};

struct ClusterMeta {
    bool contains_coinjoin = false;
    bool erroneous = false;
    std::set<Address> excluded_addresses;

    friend bool operator==(const ClusterMeta&, const ClusterMeta&) = default;
};

struct Cluster {
    ClusterId id;
    std::vector<Address> addresses;  // strictly ascending
    ClusterMeta meta;

    friend bool operator==(const Cluster&, const Cluster&) = default;
};

/// One group of a partition before ids are assigned.
struct ClusterGroup {
    std::vector<Address> addresses;
    ClusterMeta meta;
};

/// Immutable partition of addresses into clusters keyed by cluster hash,
/// together with the provenance of the analysis that produced it.
class ClusterSet {
public:
    ClusterSet() = default;
    /// Sorts each group, computes ids and checks the partition property.
    /// Throws InputError on an empty group or an address in two groups.
    ClusterSet(std::vector<ClusterGroup> groups, evidence::ProvenanceRecord provenance,
               std::set<std::string> incorporated_records = {});

    const std::map<ClusterId, Cluster>& clusters() const noexcept { return clusters_; }
    std::size_t size() const noexcept { return clusters_.size(); }
    std::size_t address_count() const noexcept { return membership_.size(); }

    std::optional<ClusterId> find(const Address& a) const;
    const Cluster* cluster(const ClusterId& id) const;
    const evidence::ProvenanceRecord& provenance() const noexcept { return provenance_; }
    /// IRIs of shared cluster records merged into this set.
    const std::set<std::string>& incorporated_records() const noexcept { return incorporated_; }

    /// Groups in id order, for building derived sets.
    std::vector<ClusterGroup> groups() const;

    friend bool operator==(const ClusterSet& a, const ClusterSet& b) {
        return a.clusters_ == b.clusters_ && a.provenance_ == b.provenance_ &&
               a.incorporated_ == b.incorporated_;
    }

private:
    std::map<ClusterId, Cluster> clusters_;
    std::unordered_map<Address, ClusterId> membership_;
    evidence::ProvenanceRecord provenance_;
    std::set<std::string> incorporated_;
};

/// {provenance, clusters:[{id, addresses, meta}], incorporated_records},
/// clusters sorted by id.
evidence::Document to_json(const ClusterSet& set);
/// Validates provenance, sorting and ids; throws ValidationError on violations.
ClusterSet cluster_set_from_json(const evidence::Document& doc);

std::string export_cluster_set(const ClusterSet& set);
ClusterSet import_cluster_set(std::string_view text);

}  // namespace mihkit::clustering

template <>
struct std::hash<mihkit::clustering::ClusterId> {
    std::size_t operator()(const mihkit::clustering::ClusterId& id) const noexcept {
        return std::hash<std::string>{}(id.str());
    }
};
