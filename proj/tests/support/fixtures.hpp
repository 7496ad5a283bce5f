#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <unistd.h>
#include <string>
#include <string_view>
#include <vector>

#include "mihkit/chain/ledger.hpp"
#include "mihkit/evidence/crypto.hpp"

namespace fixture {

// Independently computed digests (Python hashlib).
inline constexpr std::string_view kSha256_A = "559aead08264d5795d3909718cdd05abd49572e84fe55590eef31a88a08fdffd";
inline constexpr std::string_view kSha256_EmptyObject =
    "44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a";
inline constexpr std::string_view kSha256_ABCD = "babbfc637186b9ba22c6eda008b9537048032a6bbdfb4187535b4cceeb45c1cb";
inline constexpr std::string_view kSha256_BCD = "2be3cf874c5327cc38e7ee4da16b790fd99cf58c50e626f99417b47e33dca76f";

inline std::string hex_of(std::uint64_t n) {
    return mihkit::evidence::sha256_hex("fixture-" + std::to_string(n));
}

/// The two-transaction example: T1 spends A and B, T2 spends B, C and D.
inline std::string fig1a_text() {
    const std::string t0 = hex_of(0), t1 = hex_of(1), t2 = hex_of(2);
    return "{\"block\":{\"height\":0,\"hash\":\"" + hex_of(100) + "\",\"time\":1231006505}}\n"
           "{\"tx\":{\"txid\":\"" + t0 + "\",\"height\":0,\"in\":[],\"out\":[{\"a\":\"A\",\"v\":50},{\"a\":\"B\",\"v\":50},"
           "{\"a\":\"C\",\"v\":50},{\"a\":\"D\",\"v\":50}]}}\n"
           "{\"block\":{\"height\":1,\"hash\":\"" + hex_of(101) + "\",\"time\":1231007105}}\n"
           "{\"tx\":{\"txid\":\"" + t1 + "\",\"height\":1,\"in\":[{\"a\":\"A\",\"v\":50},{\"a\":\"B\",\"v\":20}],"
           "\"out\":[{\"a\":\"E\",\"v\":60}]}}\n"
           "{\"tx\":{\"txid\":\"" + t2 + "\",\"height\":1,\"in\":[{\"a\":\"B\",\"v\":30},{\"a\":\"C\",\"v\":50},"
           "{\"a\":\"D\",\"v\":50}],\"out\":[{\"a\":\"F\",\"v\":120}]}}\n";
}

inline mihkit::chain::Ledger fig1a() { return mihkit::chain::parse_ledger(std::string_view(fig1a_text())); }

inline std::string txid(std::uint64_t n) { return hex_of(1'000'000 + n); }

/// Random ledger over a small address pool: a funding coinbase, then
/// transactions spending 1..4 random pool addresses. Inputs are drawn with
/// repetition, so transactions can chain arbitrary addresses together.
inline mihkit::chain::Ledger random_graph_ledger(std::mt19937_64& rng, std::size_t n_tx) {
    using namespace mihkit::chain;
    const std::size_t pool = 2 + rng() % 60;
    auto addr = [&](std::size_t i) { return Address("addr" + std::to_string(i)); };
    Ledger l;
    l.append_block(0, hex_of(rng()), 0);
    Transaction cb;
    cb.txid = txid(rng());
    cb.block_height = 0;
    for (std::size_t i = 0; i < pool; ++i) cb.outputs.push_back({addr(i), 1000});
    l.append_transaction(cb);
    l.append_block(1, hex_of(rng()), 600);
    for (std::size_t t = 0; t < n_tx; ++t) {
        Transaction tx;
        tx.txid = txid(rng());
        tx.block_height = 1;
        const std::size_t n_in = 1 + rng() % 4;
        for (std::size_t i = 0; i < n_in; ++i) tx.inputs.push_back({addr(rng() % pool), 3 + rng() % 100});
        const std::size_t n_out = 1 + rng() % 3;
        for (std::size_t i = 0; i < n_out; ++i) tx.outputs.push_back({addr(rng() % (pool + 20)), rng() % 2});
        l.append_transaction(std::move(tx));
    }
    return l;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(std::string_view name) {
    static std::uint64_t counter = 0;
    auto p = std::filesystem::temp_directory_path() /
             ("mihkit-test-" + std::string(name) + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace fixture
