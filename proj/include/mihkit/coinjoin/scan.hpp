#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "mihkit/chain/ledger.hpp"
#include "mihkit/coinjoin/detect.hpp"
#include "mihkit/evidence/provenance.hpp"

namespace mihkit::coinjoin {

using chain::Address;

struct ScanResult {
    std::set<std::string> coinjoin_txids;
    std::set<Address> coinjoin_input_addresses;  // union of the detected txs' inputs
    std::map<std::string, std::vector<Address>> coinjoin_inputs;  // txid -> sorted distinct inputs
    std::set<std::string> timeouts;  // never counted as CoinJoins
    evidence::ProvenanceRecord provenance;

    friend bool operator==(const ScanResult&, const ScanResult&) = default;
};

/// Runs the configured detector over every non-coinbase transaction.
ScanResult scan_ledger(const chain::Ledger& ledger, const HeuristicConfig& config,
                       const std::string& currency_code, const evidence::Clock& clock);

/// {provenance, coinjoin_txids, timeouts, coinjoin_inputs}, lists sorted.
evidence::Document to_json(const ScanResult& scan);
/// Throws ValidationError on malformed input or bad provenance.
ScanResult scan_result_from_json(const evidence::Document& doc);

}  // namespace mihkit::coinjoin
