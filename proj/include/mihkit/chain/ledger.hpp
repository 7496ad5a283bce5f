#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mihkit/chain/address.hpp"

namespace mihkit::chain {

/// Smallest currency unit. Money arithmetic never leaves the integers.
using Amount = std::uint64_t;

struct TxInput {
    Address address;
    Amount value = 0;  // >= 1
    friend bool operator==(const TxInput&, const TxInput&) = default;
};

struct TxOutput {
    Address address;
    Amount value = 0;
    friend bool operator==(const TxOutput&, const TxOutput&) = default;
};

struct Transaction {
    std::string txid;  // 64 lowercase hex
    std::uint64_t block_height = 0;
    std::vector<TxInput> inputs;
    std::vector<TxOutput> outputs;

    /// Coinbase transactions have no inputs; clustering and scans skip them.
    bool is_coinbase() const noexcept { return inputs.empty(); }
    Amount input_sum() const;
    Amount output_sum() const;

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

struct Block {
    std::uint64_t height = 0;
    std::string hash;  // 64 lowercase hex
    std::int64_t time = 0;
    std::vector<std::string> txids;

    friend bool operator==(const Block&, const Block&) = default;
};

struct ChainTip {
    std::uint64_t height = 0;
    std::string block_hash;
    friend bool operator==(const ChainTip&, const ChainTip&) = default;
};

/// Append-only UTXO ledger. Transactions are kept in block order and
/// indexed by txid and by every address they reference.
class Ledger {
public:
    /// Heights must be consecutive from 0.
    void append_block(std::uint64_t height, std::string hash, std::int64_t time);
    /// The transaction must belong to the most recently appended block.
    void append_transaction(Transaction tx);

    bool empty() const noexcept { return blocks_.empty(); }
    const std::vector<Block>& blocks() const noexcept { return blocks_; }
    const std::vector<Transaction>& transactions() const noexcept { return txs_; }
    const Transaction* find_transaction(std::string_view txid) const;

    /// Height and hash of the highest block. Throws InputError when empty.
    ChainTip tip() const;

    /// Transactions referencing `a` as input or output, in block order.
    std::vector<std::string> address_transactions(const Address& a) const;
    /// Indexes into transactions() for `a`; empty for unknown addresses.
    const std::vector<std::size_t>& address_tx_indexes(const Address& a) const;
    const std::unordered_map<Address, std::vector<std::size_t>>& address_index() const noexcept {
        return addr_index_;
    }

    friend bool operator==(const Ledger& a, const Ledger& b) {
        return a.blocks_ == b.blocks_ && a.txs_ == b.txs_;
    }

private:
    std::vector<Block> blocks_;
    std::vector<Transaction> txs_;
    std::unordered_map<std::string, std::size_t> tx_index_;
    std::unordered_map<Address, std::vector<std::size_t>> addr_index_;
};

/// Reads the JSON-lines ledger format. The whole stream is rejected on the
/// first violation with a ParseError carrying the line number.
Ledger parse_ledger(std::istream& in);
Ledger parse_ledger(std::string_view text);

void write_ledger(std::ostream& out, const Ledger& ledger);
std::string serialize_ledger(const Ledger& ledger);

}  // namespace mihkit::chain
