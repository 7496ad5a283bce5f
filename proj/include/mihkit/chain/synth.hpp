#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "mihkit/chain/ledger.hpp"

namespace mihkit::chain {

/// Known wallet membership: wallet id -> its addresses. Sets are disjoint.
struct GroundTruth {
    std::map<std::string, std::set<Address>> wallets;

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

nlohmann::json ground_truth_to_json(const GroundTruth& truth);
/// Throws InputError on malformed input or overlapping wallets.
GroundTruth ground_truth_from_json(const nlohmann::json& doc);

struct PlantedCoinJoin {
    std::vector<std::string> participant_wallet_ids;  // >= 2, distinct
    Amount denomination = 0;                          // > 0
};

struct SynthSpec {
    std::uint32_t n_wallets = 10;
    std::uint32_t addresses_min = 1;  // initial funded addresses per wallet
    std::uint32_t addresses_max = 3;
    std::uint32_t n_payments = 100;
    std::vector<PlantedCoinJoin> planted_coinjoins;
    Amount fee_rate = 0;  // per input/output slot
    std::uint64_t seed = 0;
    std::uint32_t txs_per_block = 25;
};

/// Throws InputError when a field violates its range.
void validate(const SynthSpec& spec);
SynthSpec synth_spec_from_json(const nlohmann::json& doc);
nlohmann::json synth_spec_to_json(const SynthSpec& spec);

struct SynthResult {
    Ledger ledger;
    GroundTruth truth;
    std::vector<std::string> planted_txids;  // in plan order
};

/// Deterministic synthetic ledger. Wallet ids are "w1".."wN".
///
/// Ordinary payments spend 1-3 UTXOs of one wallet and have at most two
/// outputs (payment plus change to a fresh address of the sender), so they
/// never take a CoinJoin shape. Each planted CoinJoin spends one UTXO per
/// participant and pays one `denomination` output plus one change output to
/// fresh addresses of every participant.
SynthResult generate_synthetic(const SynthSpec& spec);

}  // namespace mihkit::chain
