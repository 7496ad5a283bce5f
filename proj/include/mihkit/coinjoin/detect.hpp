#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "mihkit/chain/ledger.hpp"
#include "mihkit/evidence/canonical.hpp"

namespace mihkit::coinjoin {

using chain::Amount;
using chain::Transaction;

/// Fee window and search budget of the full heuristic. A subset matches an
/// output value v when v <= sum <= v * (1 + numerator/denominator) + min_base_fee,
/// evaluated exactly in integers.
struct FullParams {
    Amount min_base_fee = 0;
    std::uint64_t fee_numerator = 0;
    std::uint64_t fee_denominator = 1;
    std::uint64_t max_search_steps = 1'000'000;

    static constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

    friend bool operator==(const FullParams&, const FullParams&) = default;
};

/// Throws InputError on a zero denominator or zero step budget.
void validate(const FullParams& p);

enum class Verdict { No, Yes, Timeout };
std::string_view to_string(Verdict v);

/// Shape test: >= 2 inputs, >= 3 outputs, p = ceil(outputs / 2) with
/// p <= inputs and p <= distinct input addresses, and the highest output
/// value multiplicity equal to p. Throws InputError for coinbase.
bool detect_structural(const Transaction& tx);

/// Yes iff some output value v of multiplicity c >= 2 can be matched by c
/// pairwise-disjoint, non-empty input subsets each summing into v's fee
/// window. Depth-first search with memoisation; Timeout once the step
/// budget is spent. Same >= 2 input / >= 3 output gate as the structural
/// test. Throws InputError for coinbase.
Verdict detect_full(const Transaction& tx, const FullParams& params);

enum class HeuristicKind { Structural, Full };

struct HeuristicConfig {
    HeuristicKind kind = HeuristicKind::Structural;
    FullParams full;

    /// "coinjoin-structural/1" or "coinjoin-full/1".
    std::string method_id() const;
    /// Parameter document recorded in provenance.
    evidence::Document params() const;

    friend bool operator==(const HeuristicConfig&, const HeuristicConfig&) = default;
};

HeuristicConfig heuristic_from_json(const evidence::Document& doc);

/// Dispatches to the configured detector.
/// Plain-language statement of the rule a heuristic implements.
std::string_view definition(HeuristicKind kind);

Verdict classify(const Transaction& tx, const HeuristicConfig& config);

}  // namespace mihkit::coinjoin
