#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "mihkit/chain/ledger.hpp"
#include "mihkit/chain/synth.hpp"
#include "mihkit/clustering/cluster_set.hpp"
#include "mihkit/coinjoin/detect.hpp"
#include "mihkit/evidence/audit.hpp"
#include "mihkit/evidence/clock.hpp"

namespace mihkit::clustering {

inline constexpr std::string_view kMethodId = "mih/1";
inline constexpr std::string_view kMethodDefinition =
    "Multi-input heuristic: all input addresses of one non-coinbase transaction are controlled by one "
    "entity, so they belong to the same cluster. Clusters are the connected components of this "
    "relation over every address seen in the ledger. Policy naive applies it to every transaction, "
    "exclude skips transactions detected as CoinJoins, mark applies it everywhere but flags clusters "
    "that absorbed a detected CoinJoin.";

/// How the multi-input heuristic treats transactions that a CoinJoin
/// detector flags. Timeout verdicts are never treated as CoinJoins.
struct CoinJoinPolicy {
    enum class Mode { Naive, Exclude, Mark };

    Mode mode = Mode::Naive;
    coinjoin::HeuristicConfig heuristic;

    static CoinJoinPolicy naive() { return {}; }
    static CoinJoinPolicy exclude(coinjoin::HeuristicConfig h) { return {Mode::Exclude, h}; }
    static CoinJoinPolicy mark(coinjoin::HeuristicConfig h) { return {Mode::Mark, h}; }

    /// Parameter document recorded in the provenance of the result.
    evidence::Document params() const;
};

std::string_view to_string(CoinJoinPolicy::Mode mode);

/// Ambient inputs of an analysis that are not part of the ledger.
struct AnalysisContext {
    std::string currency_code = "BTC";
    const evidence::Clock* clock = nullptr;  // system clock when null
};

/// Multi-input heuristic: all input addresses of a spending transaction are
/// unified. Every address in the ledger ends up in exactly one cluster;
/// output-only addresses become singletons.
ClusterSet cluster_multi_input(const chain::Ledger& ledger, const CoinJoinPolicy& policy,
                               const AnalysisContext& ctx = {});

enum class RectifyAction { ExcludeAddress, MarkErroneous, UnmarkErroneous };
std::string_view to_string(RectifyAction action);

using RectifyTarget = std::variant<Address, ClusterId>;

struct RectifyOutcome {
    ClusterSet clusters;
    evidence::AuditEntry entry;
};

/// Applies a rectification and records it in `audit`. ExcludeAddress moves
/// the address into its own flagged singleton and re-derives the id of the
/// cluster it left; Mark/UnmarkErroneous set the erroneous flag. Throws
/// ValidationError for an unknown target or an empty reason; nothing is
/// logged in that case.
RectifyOutcome rectify(const ClusterSet& set, const RectifyTarget& target, RectifyAction action,
                       std::string_view reason, const evidence::AgentRef& actor,
                       evidence::AuditSink& audit, const evidence::Clock& clock);

struct EvalMetrics {
    double pairwise_precision = 1.0;
    double pairwise_recall = 1.0;
    double linked_fraction = 1.0;
};

/// Pairwise scores over ground-truth addresses, plus the share of wallet
/// links the largest cluster piece of each wallet recovers. Throws
/// ValidationError when the ground truth names an address not in `set`.
EvalMetrics evaluate(const ClusterSet& set, const chain::GroundTruth& truth);

}  // namespace mihkit::clustering
