#include "mihkit/chain/synth.hpp"

#include <algorithm>
#include <unordered_set>

#include "mihkit/chain/rng.hpp"
#include "mihkit/error.hpp"
#include "mihkit/evidence/crypto.hpp"

namespace mihkit::chain {

namespace {

using nlohmann::json;

constexpr std::int64_t kGenesisTime = 1231006505;
constexpr std::int64_t kBlockInterval = 600;
constexpr Amount kFundingBase = 100'000'000;
constexpr char kBase58[] = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

struct Utxo {
    Address address;
    Amount value;
};

struct Wallet {
    std::string id;
    std::vector<Address> addresses;
    std::vector<Utxo> utxos;
};

class Builder {
public:
    Builder(const SynthSpec& spec) : spec_(spec), rng_(spec.seed) {}

    Address fresh_address(Wallet& w) {
        for (;;) {
            std::string id = "1";
            for (int i = 0; i < 33; ++i) id.push_back(kBase58[rng_.bounded(58)]);
            if (used_.insert(id).second) {
                Address a(std::move(id));
                w.addresses.push_back(a);
                truth_.wallets[w.id].insert(a);
                return a;
            }
        }
    }

    /// Queues a transaction in the open block, closing it when full.
    std::string emit(std::vector<TxInput> inputs, std::vector<TxOutput> outputs) {
        Transaction tx;
        tx.block_height = height_;
        tx.inputs = std::move(inputs);
        tx.outputs = std::move(outputs);
        std::string body = std::to_string(tx_counter_++) + "|" + std::to_string(height_);
        for (const auto& i : tx.inputs) body += "|i:" + i.address.str() + ":" + std::to_string(i.value);
        for (const auto& o : tx.outputs) body += "|o:" + o.address.str() + ":" + std::to_string(o.value);
        tx.txid = evidence::sha256_hex(body);
        pending_.push_back(tx);
        std::string txid = tx.txid;
        if (height_ > 0 && pending_.size() >= spec_.txs_per_block) close_block();
        return txid;
    }

    void close_block() {
        if (pending_.empty() && height_ > 0) return;
        std::string header = prev_hash_ + "|" + std::to_string(height_);
        for (const auto& tx : pending_) header += "|" + tx.txid;
        prev_hash_ = evidence::sha256_hex(header);
        ledger_.append_block(height_, prev_hash_, kGenesisTime + kBlockInterval * std::int64_t(height_));
        for (auto& tx : pending_) ledger_.append_transaction(std::move(tx));
        pending_.clear();
        ++height_;
    }

    Xoshiro256& rng() { return rng_; }
    GroundTruth& truth() { return truth_; }
    Ledger take_ledger() { return std::move(ledger_); }

private:
    const SynthSpec& spec_;
    Xoshiro256 rng_;
    std::unordered_set<std::string> used_;
    GroundTruth truth_;
    Ledger ledger_;
    std::vector<Transaction> pending_;
    std::string prev_hash_ = evidence::kZeroHash;
    std::uint64_t height_ = 0;
    std::uint64_t tx_counter_ = 0;
};

void payment(Builder& b, std::vector<Wallet>& wallets, Amount fee_rate) {
    auto& rng = b.rng();
    std::size_t sender = rng.bounded(wallets.size());
    for (std::size_t tries = 0; wallets[sender].utxos.empty(); ++tries) {
        if (tries == wallets.size()) throw InputError("synthetic economy ran out of coins");
        sender = (sender + 1) % wallets.size();
    }
    Wallet& w = wallets[sender];

    const std::size_t n_in = 1 + rng.bounded(std::min<std::size_t>(3, w.utxos.size()));
    std::vector<TxInput> inputs;
    Amount total = 0;
    for (std::size_t k = 0; k < n_in; ++k) {
        const std::size_t pick = k + rng.bounded(w.utxos.size() - k);
        std::swap(w.utxos[k], w.utxos[pick]);
        inputs.push_back({w.utxos[k].address, w.utxos[k].value});
        total += w.utxos[k].value;
    }
    w.utxos.erase(w.utxos.begin(), w.utxos.begin() + static_cast<std::ptrdiff_t>(n_in));

    const Amount fee = std::min<Amount>(fee_rate * (n_in + 2), total - 1);
    const Amount amount = 1 + rng.bounded(total - fee);
    const Amount change = total - fee - amount;

    std::size_t receiver = sender;
    if (wallets.size() > 1) {
        receiver = rng.bounded(wallets.size() - 1);
        if (receiver >= sender) ++receiver;
    }
    Wallet& r = wallets[receiver];
    const Address pay_to = rng.bounded(2) == 0
                               ? r.addresses[rng.bounded(r.addresses.size())]
                               : b.fresh_address(r);

    std::vector<TxOutput> outputs{{pay_to, amount}};
    r.utxos.push_back({pay_to, amount});
    if (change > 0) {
        Address change_to = b.fresh_address(w);
        outputs.push_back({change_to, change});
        w.utxos.push_back({change_to, change});
    }
    b.emit(std::move(inputs), std::move(outputs));
}

std::string plant(Builder& b, std::vector<Wallet>& wallets, const PlantedCoinJoin& cj,
                  Amount fee_rate) {
    auto& rng = b.rng();
    const Amount fee_share = fee_rate * 3;
    // change must be >= 1 and differ from the denomination
    const Amount spare = cj.denomination == 1 ? 2 : 1;
    std::vector<TxInput> inputs;
    std::vector<TxOutput> outputs;
    std::vector<std::pair<Wallet*, TxOutput>> credits;

    for (const auto& wid : cj.participant_wallet_ids) {
        Wallet& w = wallets[std::stoul(wid.substr(1)) - 1];
        auto best = std::max_element(w.utxos.begin(), w.utxos.end(),
                                     [](const Utxo& x, const Utxo& y) { return x.value < y.value; });
        Utxo coin;
        if (best != w.utxos.end() && best->value >= cj.denomination + fee_share + 1 &&
            best->value - cj.denomination - fee_share != cj.denomination) {
            coin = *best;
            w.utxos.erase(best);
        } else {
            coin = {b.fresh_address(w), cj.denomination + fee_share + spare};
            b.emit({}, {{coin.address, coin.value}});
        }
        inputs.push_back({coin.address, coin.value});
        const Address mixed = b.fresh_address(w);
        const Address change = b.fresh_address(w);
        outputs.push_back({mixed, cj.denomination});
        outputs.push_back({change, coin.value - cj.denomination - fee_share});
        credits.push_back({&w, outputs[outputs.size() - 2]});
        credits.push_back({&w, outputs.back()});
    }
    for (std::size_t i = outputs.size(); i > 1; --i) {
        std::swap(outputs[i - 1], outputs[rng.bounded(i)]);
    }
    for (auto& [w, out] : credits) w->utxos.push_back({out.address, out.value});
    return b.emit(std::move(inputs), std::move(outputs));
}

}  // namespace

void validate(const SynthSpec& spec) {
    if (spec.n_wallets < 1) throw InputError("n_wallets must be >= 1");
    if (spec.addresses_min < 1 || spec.addresses_max < spec.addresses_min) {
        throw InputError("addresses_per_wallet must be a range [min, max] with 1 <= min <= max");
    }
    if (spec.txs_per_block < 1) throw InputError("txs_per_block must be >= 1");
    for (const auto& cj : spec.planted_coinjoins) {
        if (cj.participant_wallet_ids.size() < 2) throw InputError("a planted CoinJoin needs >= 2 participants");
        if (cj.denomination == 0) throw InputError("denomination must be > 0");
        std::set<std::string> seen;
        for (const auto& wid : cj.participant_wallet_ids) {
            bool ok = wid.size() > 1 && wid[0] == 'w' &&
                      std::all_of(wid.begin() + 1, wid.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
                      wid[1] != '0';
            if (ok) {
                const auto n = std::stoull(wid.substr(1));
                ok = n >= 1 && n <= spec.n_wallets;
            }
            if (!ok) throw InputError("unknown participant wallet '" + wid + "'");
            if (!seen.insert(wid).second) throw InputError("duplicate participant wallet '" + wid + "'");
        }
    }
}

SynthResult generate_synthetic(const SynthSpec& spec) {
    validate(spec);
    Builder b(spec);
    auto& rng = b.rng();

    std::vector<Wallet> wallets(spec.n_wallets);
    for (std::uint32_t i = 0; i < spec.n_wallets; ++i) {
        Wallet& w = wallets[i];
        w.id = "w" + std::to_string(i + 1);
        const auto k = spec.addresses_min + rng.bounded(spec.addresses_max - spec.addresses_min + 1);
        std::vector<TxOutput> funding;
        for (std::uint64_t j = 0; j < k; ++j) {
            const Address a = b.fresh_address(w);
            const Amount v = kFundingBase + rng.bounded(kFundingBase);
            funding.push_back({a, v});
            w.utxos.push_back({a, v});
        }
        b.emit({}, std::move(funding));
    }
    b.close_block();

    SynthResult result;
    const std::size_t n_cj = spec.planted_coinjoins.size();
    std::size_t next_cj = 0;
    auto slot = [&](std::size_t j) { return (j + 1) * spec.n_payments / (n_cj + 1); };
    for (std::uint32_t i = 0; i <= spec.n_payments; ++i) {
        while (next_cj < n_cj && slot(next_cj) == i) {
            result.planted_txids.push_back(
                plant(b, wallets, spec.planted_coinjoins[next_cj], spec.fee_rate));
            ++next_cj;
        }
        if (i < spec.n_payments) payment(b, wallets, spec.fee_rate);
    }
    b.close_block();

    result.truth = std::move(b.truth());
    result.ledger = b.take_ledger();
    return result;
}

SynthSpec synth_spec_from_json(const json& doc) {
    try {
        SynthSpec s;
        s.n_wallets = doc.at("n_wallets").get<std::uint32_t>();
        const auto& range = doc.at("addresses_per_wallet");
        if (!range.is_array() || range.size() != 2) throw InputError("addresses_per_wallet must be [min, max]");
        s.addresses_min = range[0].get<std::uint32_t>();
        s.addresses_max = range[1].get<std::uint32_t>();
        s.n_payments = doc.at("n_payments").get<std::uint32_t>();
        if (doc.contains("planted_coinjoins")) {
            for (const auto& cj : doc["planted_coinjoins"]) {
                s.planted_coinjoins.push_back(
                    {cj.at("participant_wallet_ids").get<std::vector<std::string>>(),
                     cj.at("denomination").get<Amount>()});
            }
        }
        s.fee_rate = doc.value("fee_rate", Amount{0});
        s.seed = doc.value("seed", std::uint64_t{0});
        s.txs_per_block = doc.value("txs_per_block", std::uint32_t{25});
        validate(s);
        return s;
    } catch (const json::exception& e) {
        throw InputError(std::string("invalid synth spec: ") + e.what());
    }
}

json synth_spec_to_json(const SynthSpec& spec) {
    json cjs = json::array();
    for (const auto& cj : spec.planted_coinjoins) {
        cjs.push_back({{"participant_wallet_ids", cj.participant_wallet_ids},
                       {"denomination", cj.denomination}});
    }
    return {{"n_wallets", spec.n_wallets},
            {"addresses_per_wallet", {spec.addresses_min, spec.addresses_max}},
            {"n_payments", spec.n_payments},
            {"planted_coinjoins", cjs},
            {"fee_rate", spec.fee_rate},
            {"seed", spec.seed},
            {"txs_per_block", spec.txs_per_block}};
}

json ground_truth_to_json(const GroundTruth& truth) {
    json wallets = json::object();
    for (const auto& [id, addrs] : truth.wallets) {
        json list = json::array();
        for (const auto& a : addrs) list.push_back(a.str());
        wallets[id] = std::move(list);
    }
    return {{"wallets", std::move(wallets)}};
}

GroundTruth ground_truth_from_json(const json& doc) {
    GroundTruth truth;
    std::set<Address> seen;
    try {
        for (const auto& [id, list] : doc.at("wallets").items()) {
            auto& set = truth.wallets[id];
            for (const auto& a : list) {
                Address addr(a.get<std::string>());
                if (!seen.insert(addr).second) {
                    throw InputError("address " + addr.str() + " appears in more than one wallet");
                }
                set.insert(std::move(addr));
            }
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("invalid ground truth: ") + e.what());
    }
    return truth;
}

}  // namespace mihkit::chain
