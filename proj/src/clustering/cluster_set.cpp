#include "mihkit/clustering/cluster_set.hpp"

#include <algorithm>

#include "mihkit/error.hpp"
#include "mihkit/evidence/crypto.hpp"

namespace mihkit::clustering {

using evidence::Document;

std::string cluster_hash(std::span<const Address> addresses) {
    if (addresses.empty()) throw InputError("cluster hash of an empty address set");
    const bool sorted = std::is_sorted(addresses.begin(), addresses.end());
    std::vector<Address> copy;
    if (!sorted) {
        copy.assign(addresses.begin(), addresses.end());
        std::sort(copy.begin(), copy.end());
        addresses = copy;
    }
    if (std::adjacent_find(addresses.begin(), addresses.end()) != addresses.end()) {
        throw InputError("cluster hash over a list with duplicate addresses");
    }
    std::string joined;
    for (std::size_t i = 0; i < addresses.size(); ++i) {
        if (i) joined.push_back('\n');
        joined += addresses[i].str();
    }
    return evidence::sha256_hex(joined);
}

ClusterId::ClusterId(std::string digest) : digest_(std::move(digest)) {
    if (!evidence::is_hex64(digest_)) throw InputError("cluster id must be 64 lowercase hex");
}

ClusterSet::ClusterSet(std::vector<ClusterGroup> groups, evidence::ProvenanceRecord provenance,
                       std::set<std::string> incorporated_records)
    : provenance_(std::move(provenance)), incorporated_(std::move(incorporated_records)) {
    for (auto& g : groups) {
        if (g.addresses.empty()) throw InputError("empty cluster");
        std::sort(g.addresses.begin(), g.addresses.end());
        ClusterId id = ClusterId::of(g.addresses);
        for (const auto& a : g.addresses) {
            if (!membership_.emplace(a, id).second) {
                throw InputError("address " + a.str() + " assigned to more than one cluster");
            }
        }
        clusters_.emplace(id, Cluster{id, std::move(g.addresses), std::move(g.meta)});
    }
}

std::optional<ClusterId> ClusterSet::find(const Address& a) const {
    auto it = membership_.find(a);
    if (it == membership_.end()) return std::nullopt;
    return it->second;
}

const Cluster* ClusterSet::cluster(const ClusterId& id) const {
    auto it = clusters_.find(id);
    return it == clusters_.end() ? nullptr : &it->second;
}

std::vector<ClusterGroup> ClusterSet::groups() const {
    std::vector<ClusterGroup> out;
    out.reserve(clusters_.size());
    for (const auto& [id, c] : clusters_) out.push_back({c.addresses, c.meta});
    return out;
}

Document to_json(const ClusterSet& set) {
    Document clusters = Document::array();
    for (const auto& [id, c] : set.clusters()) {
        Document addrs = Document::array();
        for (const auto& a : c.addresses) addrs.push_back(a.str());
        Document excluded = Document::array();
        for (const auto& a : c.meta.excluded_addresses) excluded.push_back(a.str());
        clusters.push_back({{"id", id.str()},
                            {"addresses", std::move(addrs)},
                            {"meta",
                             {{"contains_coinjoin", c.meta.contains_coinjoin},
                              {"erroneous", c.meta.erroneous},
                              {"excluded_addresses", std::move(excluded)}}}});
    }
    return {{"provenance", evidence::to_json(set.provenance())},
            {"clusters", std::move(clusters)},
            {"incorporated_records", set.incorporated_records()}};
}

ClusterSet cluster_set_from_json(const Document& doc) {
    try {
        auto provenance = evidence::provenance_from_json(doc.at("provenance"));
        std::vector<ClusterGroup> groups;
        std::vector<std::string> stated_ids;
        for (const auto& c : doc.at("clusters")) {
            ClusterGroup g;
            for (const auto& a : c.at("addresses")) g.addresses.emplace_back(a.get<std::string>());
            if (!std::is_sorted(g.addresses.begin(), g.addresses.end())) {
                throw ValidationError("cluster " + c.at("id").get<std::string>() + " addresses are not sorted");
            }
            const auto& meta = c.at("meta");
            g.meta.contains_coinjoin = meta.at("contains_coinjoin").get<bool>();
            g.meta.erroneous = meta.at("erroneous").get<bool>();
            for (const auto& a : meta.at("excluded_addresses")) {
                g.meta.excluded_addresses.emplace(a.get<std::string>());
            }
            stated_ids.push_back(c.at("id").get<std::string>());
            groups.push_back(std::move(g));
        }
        std::vector<ClusterGroup> check = groups;
        std::set<std::string> incorporated;
        if (doc.contains("incorporated_records")) {
            incorporated = doc["incorporated_records"].get<std::set<std::string>>();
        }
        ClusterSet set(std::move(groups), std::move(provenance), std::move(incorporated));
        for (std::size_t i = 0; i < check.size(); ++i) {
            if (cluster_hash(check[i].addresses) != stated_ids[i]) {
                throw ValidationError("cluster id " + stated_ids[i] + " does not match its addresses");
            }
        }
        return set;
    } catch (const Document::exception& e) {
        throw ValidationError(std::string("malformed cluster set: ") + e.what());
    } catch (const ValidationError&) {
        throw;
    } catch (const InputError& e) {
        throw ValidationError(e.what());
    }
}

std::string export_cluster_set(const ClusterSet& set) {
    return to_json(set).dump(2) + "\n";
}

ClusterSet import_cluster_set(std::string_view text) {
    Document doc;
    try {
        doc = Document::parse(text);
    } catch (const Document::exception& e) {
        throw InputError(std::string("cluster set is not valid JSON: ") + e.what());
    }
    return cluster_set_from_json(doc);
}

}  // namespace mihkit::clustering
