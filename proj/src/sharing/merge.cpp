#include "mihkit/sharing/merge.hpp"

#include <map>
#include <set>

#include "mihkit/clustering/union_find.hpp"
#include "mihkit/error.hpp"

namespace mihkit::sharing {

using chain::Address;
using clustering::ClusterGroup;
using clustering::ClusterMeta;
using clustering::ClusterSet;

namespace {

bool changes(const ClusterSet& set, const ClusterRecord& r, const std::set<Address>& excluded) {
    if (r.erroneous) {
        for (const auto& a : r.addresses) {
            if (auto id = set.find(a); id && !set.cluster(*id)->meta.erroneous) return true;
        }
        return false;
    }
    std::optional<clustering::ClusterId> first;
    for (const auto& a : r.addresses) {
        if (excluded.contains(a)) continue;
        auto id = set.find(a);
        if (!id) return true;
        if (!first) first = id;
        else if (*first != *id) return true;
    }
    return false;
}

}  // namespace

ClusterSet merge_shared_clusters(const ClusterSet& set, std::span<const ClusterRecord> records) {
    const auto& currency = set.provenance().currency_code;
    for (const auto& r : records) {
        if (r.currency_code != currency) {
            throw ValidationError("record " + r.iri.str() + " is for " + r.currency_code + ", cluster set is for " +
                                  currency);
        }
    }

    std::set<Address> excluded;
    for (const auto& [id, c] : set.clusters()) excluded.insert(c.meta.excluded_addresses.begin(), c.meta.excluded_addresses.end());

    std::vector<Address> nodes;
    std::map<Address, std::size_t> index;
    clustering::UnionFind uf;
    auto node = [&](const Address& a) {
        auto [it, fresh] = index.emplace(a, nodes.size());
        if (fresh) {
            nodes.push_back(a);
            uf.grow(nodes.size());
        }
        return it->second;
    };

    std::vector<ClusterMeta> seed_meta;  // meta of the cluster each original root came from
    std::vector<std::size_t> seed_node;
    for (const auto& [id, c] : set.clusters()) {
        const std::size_t head = node(c.addresses.front());
        for (const auto& a : c.addresses) uf.unite(head, node(a));
        seed_meta.push_back(c.meta);
        seed_node.push_back(head);
    }

    std::set<std::string> incorporated = set.incorporated_records();
    for (const auto& r : records) {
        if (changes(set, r, excluded)) incorporated.insert(r.iri.str());
        if (r.erroneous) continue;
        std::optional<std::size_t> head;
        for (const auto& a : r.addresses) {
            if (excluded.contains(a)) continue;
            const std::size_t n = node(a);
            if (head) uf.unite(*head, n);
            else head = n;
        }
    }

    std::map<std::size_t, ClusterGroup> by_root;
    for (std::size_t i = 0; i < nodes.size(); ++i) by_root[uf.find(i)].addresses.push_back(nodes[i]);
    for (std::size_t k = 0; k < seed_meta.size(); ++k) {
        auto& meta = by_root[uf.find(seed_node[k])].meta;
        meta.contains_coinjoin |= seed_meta[k].contains_coinjoin;
        meta.erroneous |= seed_meta[k].erroneous;
        meta.excluded_addresses.insert(seed_meta[k].excluded_addresses.begin(), seed_meta[k].excluded_addresses.end());
    }
    for (const auto& r : records) {
        if (!r.erroneous) continue;
        for (const auto& a : r.addresses) {
            if (auto it = index.find(a); it != index.end()) by_root[uf.find(it->second)].meta.erroneous = true;
        }
    }

    std::vector<ClusterGroup> groups;
    groups.reserve(by_root.size());
    for (auto& [root, g] : by_root) groups.push_back(std::move(g));
    return ClusterSet(std::move(groups), set.provenance(), std::move(incorporated));
}

}  // namespace mihkit::sharing
