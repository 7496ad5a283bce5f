#include "mihkit/chain/ledger.hpp"

#include "json.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "mihkit/error.hpp"
#include "mihkit/evidence/crypto.hpp"

namespace mihkit::chain {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

Amount checked_add(Amount a, Amount b) {
    Amount r = 0;
    if (__builtin_add_overflow(a, b, &r)) throw InputError("value sum overflows 64 bits");
    return r;
}

const json& require(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw InputError(std::string("missing key '") + key + "'");
    return *it;
}

void require_exact_keys(const json& obj, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) throw InputError("expected an object");
    if (obj.size() != keys.size()) throw InputError("unexpected key set");
    for (const char* k : keys) require(obj, k);
}

std::uint64_t get_unsigned(const json& v, const char* what) {
    if (!v.is_number_integer()) throw InputError(std::string(what) + " must be an integer");
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.get<std::int64_t>() < 0) throw InputError(std::string("negative ") + what);
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
}

std::string get_hex64(const json& v, const char* what) {
    if (!v.is_string() || !evidence::is_hex64(v.get_ref<const std::string&>())) {
        throw InputError(std::string(what) + " must be 64 lowercase hex characters");
    }
    return v.get<std::string>();
}

Address get_address(const json& v) {
    if (!v.is_string()) throw InputError("address must be a string");
    return Address(v.get<std::string>());
}

template <typename Io>
std::vector<Io> parse_ios(const json& arr, bool is_input) {
    if (!arr.is_array()) throw InputError("inputs/outputs must be arrays");
    std::vector<Io> out;
    out.reserve(arr.size());
    for (const auto& item : arr) {
        require_exact_keys(item, {"a", "v"});
        Io io{get_address(item["a"]), get_unsigned(item["v"], "value")};
        if (is_input && io.value == 0) throw InputError("input value must be >= 1");
        out.push_back(std::move(io));
    }
    return out;
}

void parse_line(Ledger& ledger, std::string_view line) {
    json doc;
    try {
        doc = json::parse(line);
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object() || doc.size() != 1) throw InputError("expected {\"block\":...} or {\"tx\":...}");
    if (doc.contains("block")) {
        const auto& b = doc["block"];
        require_exact_keys(b, {"height", "hash", "time"});
        const auto& t = b["time"];
        if (!t.is_number_integer()) throw InputError("time must be an integer");
        ledger.append_block(get_unsigned(b["height"], "height"), get_hex64(b["hash"], "block hash"),
                            t.get<std::int64_t>());
    } else if (doc.contains("tx")) {
        const auto& t = doc["tx"];
        require_exact_keys(t, {"txid", "height", "in", "out"});
        Transaction tx;
        tx.txid = get_hex64(t["txid"], "txid");
        tx.block_height = get_unsigned(t["height"], "height");
        tx.inputs = parse_ios<TxInput>(t["in"], true);
        tx.outputs = parse_ios<TxOutput>(t["out"], false);
        ledger.append_transaction(std::move(tx));
    } else {
        throw InputError("unknown record type");
    }
}

}  // namespace

Amount Transaction::input_sum() const {
    Amount s = 0;
    for (const auto& i : inputs) s = checked_add(s, i.value);
    return s;
}

Amount Transaction::output_sum() const {
    Amount s = 0;
    for (const auto& o : outputs) s = checked_add(s, o.value);
    return s;
}

void Ledger::append_block(std::uint64_t height, std::string hash, std::int64_t time) {
    if (height != blocks_.size()) {
        throw InputError("non-consecutive block height " + std::to_string(height) + " (expected " +
                         std::to_string(blocks_.size()) + ")");
    }
    if (!evidence::is_hex64(hash)) throw InputError("block hash must be 64 lowercase hex characters");
    blocks_.push_back(Block{height, std::move(hash), time, {}});
}

void Ledger::append_transaction(Transaction tx) {
    if (blocks_.empty()) throw InputError("transaction before any block");
    if (tx.block_height != blocks_.back().height) {
        throw InputError("transaction height " + std::to_string(tx.block_height) +
                         " does not match current block " + std::to_string(blocks_.back().height));
    }
    if (!evidence::is_hex64(tx.txid)) throw InputError("txid must be 64 lowercase hex characters");
    if (tx_index_.contains(tx.txid)) throw InputError("duplicate txid " + tx.txid);
    for (const auto& in : tx.inputs) {
        if (in.value == 0) throw InputError("input value must be >= 1");
    }
    const Amount out_sum = tx.output_sum();
    if (!tx.is_coinbase() && tx.input_sum() < out_sum) {
        throw InputError("outputs exceed inputs in " + tx.txid);
    }

    const std::size_t idx = txs_.size();
    auto index_address = [&](const Address& a) {
        auto& list = addr_index_[a];
        if (list.empty() || list.back() != idx) list.push_back(idx);
    };
    for (const auto& in : tx.inputs) index_address(in.address);
    for (const auto& out : tx.outputs) index_address(out.address);
    tx_index_.emplace(tx.txid, idx);
    blocks_.back().txids.push_back(tx.txid);
    txs_.push_back(std::move(tx));
}

const Transaction* Ledger::find_transaction(std::string_view txid) const {
    auto it = tx_index_.find(std::string(txid));
    return it == tx_index_.end() ? nullptr : &txs_[it->second];
}

ChainTip Ledger::tip() const {
    if (blocks_.empty()) throw InputError("ledger is empty: tip undefined");
    return {blocks_.back().height, blocks_.back().hash};
}

std::vector<std::string> Ledger::address_transactions(const Address& a) const {
    std::vector<std::string> out;
    for (auto i : address_tx_indexes(a)) out.push_back(txs_[i].txid);
    return out;
}

const std::vector<std::size_t>& Ledger::address_tx_indexes(const Address& a) const {
    static const std::vector<std::size_t> kNone;
    auto it = addr_index_.find(a);
    return it == addr_index_.end() ? kNone : it->second;
}

Ledger parse_ledger(std::istream& in) {
    Ledger ledger;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        try {
            parse_line(ledger, line);
        } catch (const InputError& e) {
            throw ParseError(lineno, e.what());
        }
    }
    return ledger;
}

Ledger parse_ledger(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_ledger(in);
}

void write_ledger(std::ostream& out, const Ledger& ledger) {
    auto ios = [](const auto& list) {
        ordered_json arr = ordered_json::array();
        for (const auto& io : list) arr.push_back(ordered_json{{"a", io.address.str()}, {"v", io.value}});
        return arr;
    };
    std::size_t next_tx = 0;
    const auto& txs = ledger.transactions();
    for (const auto& b : ledger.blocks()) {
        ordered_json header{{"block", {{"height", b.height}, {"hash", b.hash}, {"time", b.time}}}};
        out << header.dump() << '\n';
        for (std::size_t k = 0; k < b.txids.size(); ++k, ++next_tx) {
            const auto& tx = txs[next_tx];
            ordered_json line{{"tx",
                               {{"txid", tx.txid},
                                {"height", tx.block_height},
                                {"in", ios(tx.inputs)},
                                {"out", ios(tx.outputs)}}}};
            out << line.dump() << '\n';
        }
    }
}

std::string serialize_ledger(const Ledger& ledger) {
    std::ostringstream out;
    write_ledger(out, ledger);
    return out.str();
}

}  // namespace mihkit::chain
