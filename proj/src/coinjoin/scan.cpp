#include "mihkit/coinjoin/scan.hpp"

#include <algorithm>

#include "mihkit/error.hpp"

namespace mihkit::coinjoin {

using evidence::Document;

ScanResult scan_ledger(const chain::Ledger& ledger, const HeuristicConfig& config,
                       const std::string& currency_code, const evidence::Clock& clock) {
    if (config.kind == HeuristicKind::Full) validate(config.full);
    ScanResult r;
    for (const auto& tx : ledger.transactions()) {
        if (tx.is_coinbase()) continue;
        switch (classify(tx, config)) {
            case Verdict::Yes: {
                std::vector<Address> inputs;
                for (const auto& in : tx.inputs) inputs.push_back(in.address);
                std::sort(inputs.begin(), inputs.end());
                inputs.erase(std::unique(inputs.begin(), inputs.end()), inputs.end());
                r.coinjoin_input_addresses.insert(inputs.begin(), inputs.end());
                r.coinjoin_txids.insert(tx.txid);
                r.coinjoin_inputs.emplace(tx.txid, std::move(inputs));
                break;
            }
            case Verdict::Timeout:
                r.timeouts.insert(tx.txid);
                break;
            case Verdict::No:
                break;
        }
    }
    r.provenance = evidence::make_provenance(ledger, currency_code, config.method_id(), config.params(), clock);
    return r;
}

Document to_json(const ScanResult& scan) {
    Document inputs = Document::object();
    for (const auto& [txid, addrs] : scan.coinjoin_inputs) {
        Document list = Document::array();
        for (const auto& a : addrs) list.push_back(a.str());
        inputs[txid] = std::move(list);
    }
    return {{"provenance", evidence::to_json(scan.provenance)},
            {"coinjoin_txids", scan.coinjoin_txids},
            {"timeouts", scan.timeouts},
            {"coinjoin_inputs", std::move(inputs)}};
}

ScanResult scan_result_from_json(const Document& doc) {
    try {
        ScanResult r;
        r.provenance = evidence::provenance_from_json(doc.at("provenance"));
        r.coinjoin_txids = doc.at("coinjoin_txids").get<std::set<std::string>>();
        r.timeouts = doc.at("timeouts").get<std::set<std::string>>();
        for (const auto& [txid, list] : doc.at("coinjoin_inputs").items()) {
            std::vector<Address> addrs;
            for (const auto& a : list) addrs.emplace_back(a.get<std::string>());
            if (!std::is_sorted(addrs.begin(), addrs.end()) ||
                std::adjacent_find(addrs.begin(), addrs.end()) != addrs.end()) {
                throw ValidationError("inputs of " + txid + " are not strictly sorted");
            }
            r.coinjoin_input_addresses.insert(addrs.begin(), addrs.end());
            r.coinjoin_inputs.emplace(txid, std::move(addrs));
        }
        if (r.coinjoin_inputs.size() != r.coinjoin_txids.size() ||
            !std::equal(r.coinjoin_txids.begin(), r.coinjoin_txids.end(), r.coinjoin_inputs.begin(),
                        [](const std::string& t, const auto& kv) { return t == kv.first; })) {
            throw ValidationError("coinjoin_inputs does not cover exactly the detected transactions");
        }
        return r;
    } catch (const Document::exception& e) {
        throw ValidationError(std::string("malformed scan result: ") + e.what());
    } catch (const ValidationError&) {
        throw;
    } catch (const InputError& e) {
        throw ValidationError(e.what());
    }
}

}  // namespace mihkit::coinjoin
