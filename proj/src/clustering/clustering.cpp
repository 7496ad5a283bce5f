#include "mihkit/clustering/clustering.hpp"

#include <algorithm>
#include <unordered_map>

#include "mihkit/clustering/union_find.hpp"
#include "mihkit/error.hpp"

namespace mihkit::clustering {

using evidence::Document;

std::string_view to_string(CoinJoinPolicy::Mode mode) {
    switch (mode) {
        case CoinJoinPolicy::Mode::Naive: return "naive";
        case CoinJoinPolicy::Mode::Exclude: return "exclude";
        case CoinJoinPolicy::Mode::Mark: return "mark";
    }
    return "?";
}

Document CoinJoinPolicy::params() const {
    Document doc{{"policy", to_string(mode)}};
    if (mode != Mode::Naive) doc["coinjoin"] = heuristic.params();
    return doc;
}

ClusterSet cluster_multi_input(const chain::Ledger& ledger, const CoinJoinPolicy& policy,
                               const AnalysisContext& ctx) {
    static const evidence::SystemClock system_clock;
    const evidence::Clock& clock = ctx.clock ? *ctx.clock : system_clock;

    std::unordered_map<Address, std::size_t> index;
    std::vector<const Address*> addresses;
    auto id_of = [&](const Address& a) {
        auto [it, fresh] = index.try_emplace(a, addresses.size());
        if (fresh) addresses.push_back(&it->first);
        return it->second;
    };

    UnionFind uf;
    std::vector<std::size_t> marked;  // one input per CoinJoin kept under Mark
    for (const auto& tx : ledger.transactions()) {
        for (const auto& out : tx.outputs) id_of(out.address);
        if (tx.is_coinbase()) continue;
        std::vector<std::size_t> ids;
        ids.reserve(tx.inputs.size());
        for (const auto& in : tx.inputs) ids.push_back(id_of(in.address));
        uf.grow(addresses.size());

        bool coinjoin = false;
        if (policy.mode != CoinJoinPolicy::Mode::Naive) {
            coinjoin = coinjoin::classify(tx, policy.heuristic) == coinjoin::Verdict::Yes;
        }
        if (coinjoin && policy.mode == CoinJoinPolicy::Mode::Exclude) continue;
        for (std::size_t k = 1; k < ids.size(); ++k) uf.unite(ids[0], ids[k]);
        if (coinjoin) marked.push_back(ids[0]);
    }
    uf.grow(addresses.size());

    std::unordered_map<std::size_t, std::size_t> group_of_root;
    std::vector<ClusterGroup> groups;
    for (std::size_t i = 0; i < addresses.size(); ++i) {
        auto [it, fresh] = group_of_root.try_emplace(uf.find(i), groups.size());
        if (fresh) groups.emplace_back();
        groups[it->second].addresses.push_back(*addresses[i]);
    }
    for (auto m : marked) groups[group_of_root.at(uf.find(m))].meta.contains_coinjoin = true;

    auto provenance = evidence::make_provenance(ledger, ctx.currency_code, std::string(kMethodId),
                                                policy.params(), clock);
    return ClusterSet(std::move(groups), std::move(provenance));
}

std::string_view to_string(RectifyAction action) {
    switch (action) {
        case RectifyAction::ExcludeAddress: return "exclude-address";
        case RectifyAction::MarkErroneous: return "mark-erroneous";
        case RectifyAction::UnmarkErroneous: return "unmark-erroneous";
    }
    return "?";
}

RectifyOutcome rectify(const ClusterSet& set, const RectifyTarget& target, RectifyAction action,
                       std::string_view reason, const evidence::AgentRef& actor,
                       evidence::AuditSink& audit, const evidence::Clock& clock) {
    if (reason.empty()) throw ValidationError("rectification requires a reason");

    std::string target_text;
    std::optional<ClusterId> id;
    if (const auto* a = std::get_if<Address>(&target)) {
        target_text = a->str();
        id = set.find(*a);
        if (!id) throw ValidationError("unknown address " + a->str());
    } else {
        const auto& cid = std::get<ClusterId>(target);
        target_text = cid.str();
        if (action == RectifyAction::ExcludeAddress) {
            throw ValidationError("exclude-address needs an address target, not a cluster id");
        }
        if (!set.cluster(cid)) throw ValidationError("unknown cluster " + cid.str());
        id = cid;
    }

    const Cluster& source = *set.cluster(*id);
    std::vector<ClusterGroup> groups;
    Document before = Document::array({id->str()});
    for (const auto& [cid, c] : set.clusters()) {
        if (cid == *id) continue;
        groups.push_back({c.addresses, c.meta});
    }

    ClusterGroup changed{source.addresses, source.meta};
    switch (action) {
        case RectifyAction::ExcludeAddress: {
            const Address& a = std::get<Address>(target);
            ClusterGroup single{{a}, {}};
            single.meta.excluded_addresses.insert(a);
            if (changed.addresses.size() > 1) {
                std::erase(changed.addresses, a);
                changed.meta.excluded_addresses.insert(a);
                groups.push_back(std::move(changed));
            } else {
                single.meta.contains_coinjoin = source.meta.contains_coinjoin;
                single.meta.erroneous = source.meta.erroneous;
            }
            groups.push_back(std::move(single));
            break;
        }
        case RectifyAction::MarkErroneous:
        case RectifyAction::UnmarkErroneous:
            changed.meta.erroneous = action == RectifyAction::MarkErroneous;
            groups.push_back(std::move(changed));
            break;
    }

    ClusterSet result(std::move(groups), set.provenance(), set.incorporated_records());
    Document after = Document::array();
    if (action == RectifyAction::ExcludeAddress) {
        const Address& a = std::get<Address>(target);
        after.push_back(result.find(a)->str());
        if (source.addresses.size() > 1) after.push_back(result.find(source.addresses[0] == a
                                                                         ? source.addresses[1]
                                                                         : source.addresses[0])->str());
    } else {
        after.push_back(id->str());
    }

    Document detail{{"rectification", to_string(action)},
                    {"reason", reason},
                    {"before", std::move(before)},
                    {"after", std::move(after)}};
    auto entry = audit.append(actor, evidence::audit_action("rectify"), target_text, std::move(detail), clock);
    return {std::move(result), std::move(entry)};
}

EvalMetrics evaluate(const ClusterSet& set, const chain::GroundTruth& truth) {
    // overlap[(cluster, wallet)] and per-cluster ground-truth counts
    std::map<std::pair<ClusterId, std::string>, std::uint64_t> overlap;
    std::map<ClusterId, std::uint64_t> in_cluster;
    std::map<std::string, std::uint64_t> wallet_size;
    for (const auto& [wallet, addrs] : truth.wallets) {
        wallet_size[wallet] = addrs.size();
        for (const auto& a : addrs) {
            auto id = set.find(a);
            if (!id) throw ValidationError("ground truth address " + a.str() + " is not in the cluster set");
            ++overlap[{*id, wallet}];
            ++in_cluster[*id];
        }
    }
    auto pairs = [](std::uint64_t n) { return static_cast<long double>(n) * (n - (n > 0)) / 2; };

    long double both = 0, clustered = 0, walleted = 0;
    for (const auto& [key, n] : overlap) both += pairs(n);
    for (const auto& [id, n] : in_cluster) clustered += pairs(n);
    for (const auto& [w, n] : wallet_size) walleted += pairs(n);

    std::map<std::string, std::uint64_t> largest_piece;
    for (const auto& [key, n] : overlap) {
        auto& best = largest_piece[key.second];
        best = std::max(best, n);
    }
    long double linked = 0, linkable = 0;
    for (const auto& [w, n] : wallet_size) {
        if (n <= 1) continue;
        linked += largest_piece[w] - 1;
        linkable += n - 1;
    }

    EvalMetrics m;
    m.pairwise_precision = clustered > 0 ? static_cast<double>(both / clustered) : 1.0;
    m.pairwise_recall = walleted > 0 ? static_cast<double>(both / walleted) : 1.0;
    m.linked_fraction = linkable > 0 ? static_cast<double>(linked / linkable) : 1.0;
    return m;
}

}  // namespace mihkit::clustering
