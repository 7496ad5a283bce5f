#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "mihkit/chain/ledger.hpp"
#include "mihkit/chain/rng.hpp"
#include "mihkit/chain/synth.hpp"
#include "mihkit/coinjoin/detect.hpp"
#include "mihkit/coinjoin/scan.hpp"
#include "mihkit/error.hpp"
#include "mihkit/evidence/clock.hpp"
#include "mihkit/evidence/crypto.hpp"
#include "oracles.hpp"

using namespace mihkit;
using chain::Address;

namespace {

chain::SynthSpec random_spec(std::mt19937_64& rng) {
    chain::SynthSpec s;
    s.n_wallets = 2 + rng() % 12;
    s.addresses_min = 1 + rng() % 2;
    s.addresses_max = s.addresses_min + rng() % 3;
    s.n_payments = rng() % 80;
    s.fee_rate = rng() % 50;
    s.seed = rng();
    s.txs_per_block = 1 + rng() % 30;
    const std::size_t k = rng() % 3;
    for (std::size_t j = 0; j < k && s.n_wallets >= 2; ++j) {
        chain::PlantedCoinJoin cj;
        std::set<std::string> ids;
        const std::size_t parts = 2 + rng() % (s.n_wallets - 1);
        while (ids.size() < parts) ids.insert("w" + std::to_string(1 + rng() % s.n_wallets));
        cj.participant_wallet_ids.assign(ids.begin(), ids.end());
        cj.denomination = 1 + rng() % 5'000'000;
        s.planted_coinjoins.push_back(cj);
    }
    return s;
}

const evidence::FixedClock kClock(evidence::parse_rfc3339("2024-01-01T00:00:00Z"));

}  // namespace

TEST_CASE("address validation") {
    CHECK_NOTHROW(Address("1BoatSLRHtKNngkdXEeobR76b53LETtpyT"));
    CHECK_THROWS_AS(Address(""), InputError);
    CHECK_THROWS_AS(Address("has space"), InputError);
    CHECK_THROWS_AS(Address("tab\there"), InputError);
    CHECK_THROWS_AS(Address(std::string("nul\0x", 5)), InputError);
    CHECK(Address("B") > Address("A"));
    CHECK(Address("Z") < Address("a"));  // byte order, not locale order
}

TEST_CASE("Fig. 1a ledger parses") {
    const auto l = fixture::fig1a();
    CHECK(l.transactions().size() == 3);  // includes the funding coinbase
    std::set<Address> inputs;
    std::size_t spending = 0;
    for (const auto& tx : l.transactions()) {
        if (tx.is_coinbase()) continue;
        ++spending;
        for (const auto& in : tx.inputs) inputs.insert(in.address);
    }
    CHECK(spending == 2);
    CHECK(inputs == std::set<Address>{Address("A"), Address("B"), Address("C"), Address("D")});
}

TEST_CASE("address_transactions") {
    const auto l = fixture::fig1a();
    const auto b = l.address_transactions(Address("B"));
    REQUIRE(b.size() == 3);  // funded by the coinbase, then spent by T1 and T2
    CHECK(b[1] == fixture::hex_of(1));
    CHECK(b[2] == fixture::hex_of(2));
    CHECK(l.address_transactions(Address("nobody")).empty());
    CHECK(l.address_transactions(Address("E")) == std::vector<std::string>{fixture::hex_of(1)});
}

TEST_CASE("ledger tip") {
    chain::Ledger empty;
    CHECK_THROWS_AS(empty.tip(), InputError);
    chain::Ledger l;
    l.append_block(0, fixture::hex_of(10), 0);
    CHECK(l.tip().height == 0);
    CHECK(l.tip().block_hash == fixture::hex_of(10));
    l.append_block(1, fixture::hex_of(11), 600);
    l.append_block(2, fixture::hex_of(12), 1200);
    CHECK(l.tip().height == 2);
    CHECK(l.tip().block_hash == fixture::hex_of(12));
    CHECK(chain::parse_ledger(std::string_view("")).empty());
}

TEST_CASE("parse errors name the line") {
    std::istringstream in(fixture::fig1a_text());
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);

    SUBCASE("duplicate txid on line 7") {
        std::string text;
        for (const auto& l : lines) text += l + "\n";  // lines 1-5
        text += "{\"block\":{\"height\":2,\"hash\":\"" + fixture::hex_of(102) + "\",\"time\":0}}\n";
        std::string again = lines[3];  // T1, re-used at height 2
        again.replace(again.find("\"height\":1"), 10, "\"height\":2");
        text += again + "\n";
        try {
            chain::parse_ledger(std::string_view(text));
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 7);
            CHECK(std::string(e.what()).find("line 7") != std::string::npos);
        }
    }
    SUBCASE("non-consecutive heights") {
        const std::string text = lines[0] + "\n{\"block\":{\"height\":2,\"hash\":\"" + fixture::hex_of(9) +
                                 "\",\"time\":0}}\n";
        try {
            chain::parse_ledger(std::string_view(text));
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("negative value") {
        std::string text = lines[0] + "\n" + lines[1] + "\n";
        text.replace(text.find("\"v\":50"), 6, "\"v\":-5");
        CHECK_THROWS_AS(chain::parse_ledger(std::string_view(text)), ParseError);
    }
    SUBCASE("malformed json and unknown keys") {
        CHECK_THROWS_AS(chain::parse_ledger(std::string_view("{\"block\":")), ParseError);
        CHECK_THROWS_AS(chain::parse_ledger(std::string_view(
                            "{\"block\":{\"height\":0,\"hash\":\"" + fixture::hex_of(1) + "\",\"time\":0,\"x\":1}}")),
                        ParseError);
    }
    SUBCASE("outputs exceeding inputs") {
        std::string text = lines[0] + "\n" + lines[1] + "\n" + lines[2] + "\n" + lines[3] + "\n";
        text.replace(text.find("\"v\":60"), 6, "\"v\":71");
        try {
            chain::parse_ledger(std::string_view(text));
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 4);
        }
    }
}

TEST_CASE("ledger round-trip and index soundness on generated ledgers") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
        const auto r = chain::generate_synthetic(random_spec(rng));
        const auto text = chain::serialize_ledger(r.ledger);
        const auto back = chain::parse_ledger(std::string_view(text));
        CHECK(back == r.ledger);
        CHECK(chain::serialize_ledger(back) == text);

        std::map<Address, std::set<std::string>> expected;
        for (const auto& tx : r.ledger.transactions()) {
            for (const auto& in : tx.inputs) expected[in.address].insert(tx.txid);
            for (const auto& out : tx.outputs) expected[out.address].insert(tx.txid);
            if (!tx.is_coinbase()) CHECK(tx.input_sum() >= tx.output_sum());
        }
        CHECK(r.ledger.address_index().size() == expected.size());
        for (const auto& [a, txids] : expected) {
            const auto got = r.ledger.address_transactions(a);
            CHECK(std::set<std::string>(got.begin(), got.end()) == txids);
            CHECK(got.size() == txids.size());
        }
    }
}

TEST_CASE("xoshiro256** reference values") {
    // First outputs for seed 0 through splitmix64 seeding, cross-checked
    // against an independent Python transcription of both algorithms.
    chain::Xoshiro256 rng(0);
    const std::uint64_t expected[] = {0x99ec5f36cb75f2b4ULL, 0xbf6e1f784956452aULL, 0x1a5f849d4933e6e0ULL};
    for (auto e : expected) CHECK(rng.next() == e);
}

TEST_CASE("synthetic generation is a pure function of the spec") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        const auto spec = random_spec(rng);
        const auto a = chain::generate_synthetic(spec);
        const auto b = chain::generate_synthetic(spec);
        CHECK(evidence::sha256_hex(chain::serialize_ledger(a.ledger)) ==
              evidence::sha256_hex(chain::serialize_ledger(b.ledger)));
        CHECK(a.truth == b.truth);
        CHECK(a.planted_txids == b.planted_txids);
    }
}

TEST_CASE("generator properties") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 30; ++i) {
        const auto spec = random_spec(rng);
        const auto r = chain::generate_synthetic(spec);
        std::map<Address, std::string> wallet_of;
        for (const auto& [w, addrs] : r.truth.wallets) {
            for (const auto& a : addrs) CHECK(wallet_of.emplace(a, w).second);  // disjoint wallets
        }
        const std::set<std::string> planted(r.planted_txids.begin(), r.planted_txids.end());
        CHECK(planted.size() == spec.planted_coinjoins.size());
        for (const auto& tx : r.ledger.transactions()) {
            if (tx.is_coinbase()) continue;
            std::set<std::string> wallets;
            for (const auto& in : tx.inputs) wallets.insert(wallet_of.at(in.address));
            std::set<Address> distinct;
            for (const auto& in : tx.inputs) distinct.insert(in.address);
            std::vector<std::uint64_t> outs;
            for (const auto& o : tx.outputs) outs.push_back(o.value);
            const bool shaped = oracle::structural(tx.inputs.size(), distinct.size(), outs);
            if (planted.contains(tx.txid)) {
                CHECK(shaped);
            } else {
                CHECK(wallets.size() == 1);  // ordinary payments spend from one wallet
                CHECK_FALSE(shaped);
            }
        }
    }
}

TEST_CASE("planted CoinJoin takes one input per participant") {
    chain::SynthSpec spec;
    spec.n_wallets = 5;
    spec.n_payments = 40;
    spec.fee_rate = 3;
    spec.seed = 3;
    spec.planted_coinjoins = {{{"w1", "w2", "w3"}, 250'000}};
    const auto r = chain::generate_synthetic(spec);
    REQUIRE(r.planted_txids.size() == 1);
    const auto* tx = r.ledger.find_transaction(r.planted_txids[0]);
    REQUIRE(tx);
    CHECK(tx->inputs.size() == 3);
    std::size_t denom = 0;
    for (const auto& o : tx->outputs) denom += o.value == 250'000;
    CHECK(denom == 3);
    CHECK(coinjoin::detect_structural(*tx));

    spec.planted_coinjoins.clear();
    const auto plain = chain::generate_synthetic(spec);
    coinjoin::HeuristicConfig structural;
    CHECK(coinjoin::scan_ledger(plain.ledger, structural, "BTC", kClock).coinjoin_txids.empty());
}

TEST_CASE("synth spec validation") {
    chain::SynthSpec s;
    s.n_wallets = 0;
    CHECK_THROWS_AS(chain::validate(s), InputError);
    s.n_wallets = 3;
    s.planted_coinjoins = {{{"w1"}, 10}};
    CHECK_THROWS_AS(chain::validate(s), InputError);
    s.planted_coinjoins = {{{"w1", "w9"}, 10}};
    CHECK_THROWS_AS(chain::validate(s), InputError);
    s.planted_coinjoins = {{{"w1", "w2"}, 0}};
    CHECK_THROWS_AS(chain::validate(s), InputError);
    s.planted_coinjoins = {{{"w1", "w2"}, 10}};
    CHECK_NOTHROW(chain::validate(s));
    CHECK(chain::synth_spec_from_json(chain::synth_spec_to_json(s)).planted_coinjoins.size() == 1);
}
