#include <algorithm>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "mihkit/chain/synth.hpp"
#include "mihkit/clustering/clustering.hpp"
#include "mihkit/coinjoin/contamination.hpp"
#include "mihkit/coinjoin/detect.hpp"
#include "mihkit/coinjoin/scan.hpp"
#include "mihkit/error.hpp"
#include "mihkit/evidence/clock.hpp"
#include "mihkit/evidence/provenance.hpp"
#include "oracles.hpp"

using namespace mihkit;
using namespace mihkit::coinjoin;
using chain::Address;

namespace {

const evidence::FixedClock kClock(evidence::parse_rfc3339("2024-01-01T00:00:00Z"));

chain::Transaction tx_of(const std::vector<std::pair<std::string, chain::Amount>>& in,
                         const std::vector<chain::Amount>& out) {
    chain::Transaction tx;
    tx.txid = fixture::txid(0);
    for (const auto& [a, v] : in) tx.inputs.push_back({Address(a), v});
    std::size_t i = 0;
    for (auto v : out) tx.outputs.push_back({Address("out" + std::to_string(i++)), v});
    return tx;
}

chain::Transaction tx_values(const std::vector<chain::Amount>& in, const std::vector<chain::Amount>& out) {
    std::vector<std::pair<std::string, chain::Amount>> ins;
    for (std::size_t i = 0; i < in.size(); ++i) ins.push_back({"in" + std::to_string(i), in[i]});
    return tx_of(ins, out);
}

FullParams fees(chain::Amount base, std::uint64_t num = 0, std::uint64_t den = 1, std::uint64_t steps = FullParams::kUnbounded) {
    return {base, num, den, steps};
}

}  // namespace

TEST_CASE("structural rule examples") {
    CHECK_FALSE(detect_structural(tx_values({1000}, {600, 390})));
    CHECK(detect_structural(tx_values({300, 300, 300}, {200, 200, 200, 90, 190})));
    CHECK(detect_structural(tx_values({600, 600}, {500, 500, 300, 200})));
    // same shape, but only two distinct input addresses for p = 3
    CHECK_FALSE(detect_structural(tx_of({{"x", 300}, {"x", 300}, {"y", 300}}, {200, 200, 200, 90, 190})));
    // a tie at the maximal multiplicity still counts
    CHECK(detect_structural(tx_values({600, 600}, {500, 500, 300, 300})));
    // multiplicity above p
    CHECK_FALSE(detect_structural(tx_values({600, 600}, {100, 100, 100, 100})));
    CHECK_THROWS_AS(detect_structural(tx_values({}, {1, 1, 1})), InputError);
}

TEST_CASE("structural verdict ignores ordering") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
        const std::size_t n_in = 1 + rng() % 5, n_out = 1 + rng() % 6;
        std::vector<std::pair<std::string, chain::Amount>> in;
        for (std::size_t k = 0; k < n_in; ++k) in.push_back({"a" + std::to_string(rng() % 4), 1 + rng() % 5});
        std::vector<chain::Amount> out;
        for (std::size_t k = 0; k < n_out; ++k) out.push_back(100 * (1 + rng() % 3));
        const bool v = detect_structural(tx_of(in, out));
        std::shuffle(in.begin(), in.end(), rng);
        std::shuffle(out.begin(), out.end(), rng);
        CHECK(detect_structural(tx_of(in, out)) == v);
    }
}

TEST_CASE("full heuristic examples") {
    CHECK(detect_full(tx_values({100}, {30, 30, 30}), fees(0)) == Verdict::No);  // gate
    CHECK(detect_full(tx_values({100, 105}, {100, 100, 5}), fees(0)) == Verdict::No);
    CHECK(detect_full(tx_values({100, 105}, {100, 100, 5}), fees(5)) == Verdict::Yes);
    // proportional fee: 105 <= 100 * (1 + 5/100)
    CHECK(detect_full(tx_values({100, 105}, {100, 100, 5}), fees(0, 5, 100)) == Verdict::Yes);
    CHECK(detect_full(tx_values({100, 106}, {100, 100, 6}), fees(0, 5, 100)) == Verdict::No);
    // subsets, not single inputs
    CHECK(detect_full(tx_values({60, 40, 70, 30, 9}, {100, 100, 9}), fees(0)) == Verdict::Yes);
    // zero-valued repeated outputs need non-empty subsets summing to <= base
    CHECK(detect_full(tx_values({5, 7}, {0, 0, 12}), fees(0)) == Verdict::No);
    CHECK(detect_full(tx_values({5, 7}, {0, 0, 12}), fees(7)) == Verdict::Yes);
    CHECK_THROWS_AS(detect_full(tx_values({}, {1, 1, 1}), fees(0)), InputError);
    CHECK_THROWS_AS(detect_full(tx_values({1, 1}, {1, 1, 1}), fees(0, 1, 0)), InputError);
}

TEST_CASE("full heuristic times out instead of guessing") {
    // even inputs can never reach an odd target, but the search has to find that out
    std::vector<chain::Amount> in;
    for (int i = 0; i < 12; ++i) in.push_back(1000 + 2 * i);
    const auto tx = tx_values(in, {3001, 3001, 3001, 1});
    CHECK(detect_full(tx, fees(0, 0, 1, 50)) == Verdict::Timeout);
    CHECK(detect_full(tx, fees(0)) == Verdict::No);
}

TEST_CASE("full heuristic agrees with the exhaustive oracle on 8-input transactions") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 300; ++i) {
        std::vector<chain::Amount> in, out;
        for (int k = 0; k < 8; ++k) in.push_back(1 + rng() % 40);
        const std::size_t n_out = 3 + rng() % 4;
        for (std::size_t k = 0; k < n_out; ++k) out.push_back(rng() % 30);
        const chain::Amount base = rng() % 4;
        const std::uint64_t num = rng() % 3, den = 1 + rng() % 10;
        const auto v = detect_full(tx_values(in, out), fees(base, num, den));
        CHECK(v != Verdict::Timeout);
        CHECK((v == Verdict::Yes) == oracle::full(in, out, base, num, den));
    }
}

TEST_CASE("heuristic config round-trips through its params") {
    HeuristicConfig c;
    c.kind = HeuristicKind::Full;
    c.full = fees(3, 1, 100, 5000);
    const auto back = heuristic_from_json(c.params());
    CHECK(back.kind == HeuristicKind::Full);
    CHECK(back.full.min_base_fee == 3);
    CHECK(back.full.fee_numerator == 1);
    CHECK(back.full.fee_denominator == 100);
    CHECK(back.full.max_search_steps == 5000);
    CHECK(c.method_id() == "coinjoin-full/1");
    CHECK(HeuristicConfig{}.method_id() == "coinjoin-structural/1");
}

TEST_CASE("scan") {
    HeuristicConfig structural;
    const auto empty = scan_ledger(chain::Ledger{}, structural, "BTC", kClock);
    CHECK(empty.coinjoin_txids.empty());
    CHECK(empty.coinjoin_input_addresses.empty());

    chain::SynthSpec spec;
    spec.n_wallets = 8;
    spec.n_payments = 120;
    spec.fee_rate = 2;
    spec.seed = 77;
    spec.planted_coinjoins = {{{"w1", "w2"}, 400'000}, {{"w3", "w4", "w5"}, 777}, {{"w6", "w7", "w8", "w1"}, 90'000}};
    const auto r = chain::generate_synthetic(spec);
    const auto s = scan_ledger(r.ledger, structural, "BTC", kClock);
    CHECK(s.coinjoin_txids == std::set<std::string>(r.planted_txids.begin(), r.planted_txids.end()));

    std::set<Address> expected;
    for (const auto& id : s.coinjoin_txids) {
        for (const auto& in : r.ledger.find_transaction(id)->inputs) expected.insert(in.address);
    }
    CHECK(s.coinjoin_input_addresses == expected);
    CHECK(scan_result_from_json(to_json(s)) == s);

    // Each planted input also carries its owner's change, so a window that
    // only allows the fee share misses them and one wide enough for the
    // largest input finds them all.
    HeuristicConfig full;
    full.kind = HeuristicKind::Full;
    full.full = fees(spec.fee_rate * 3);
    const auto narrow = scan_ledger(r.ledger, full, "BTC", kClock);
    chain::Amount widest = 0;
    for (const auto& id : r.planted_txids) {
        CHECK_FALSE(narrow.coinjoin_txids.contains(id));
        for (const auto& in : r.ledger.find_transaction(id)->inputs) widest = std::max(widest, in.value);
    }
    full.full = fees(widest);
    const auto wide = scan_ledger(r.ledger, full, "BTC", kClock);
    for (const auto& id : r.planted_txids) CHECK(wide.coinjoin_txids.contains(id));
}

TEST_CASE("contamination") {
    using clustering::ClusterGroup;
    const auto prov = evidence::make_provenance(chain::Ledger{}, "BTC", "mih/1", {{"policy", "naive"}}, kClock);
    auto group = [](std::initializer_list<const char*> names) {
        ClusterGroup g;
        for (auto n : names) g.addresses.emplace_back(n);
        return g;
    };
    const clustering::ClusterSet set({group({"a1"}), group({"b1", "b2"}), group({"c1", "c2", "c3"}), group({"d1"})},
                                     prov);
    ScanResult scan;
    scan.provenance = evidence::make_provenance(chain::Ledger{}, "BTC", "coinjoin-structural/1",
                                                {{"heuristic", "structural"}}, kClock);
    auto add = [&](std::string txid, std::initializer_list<const char*> inputs) {
        auto& v = scan.coinjoin_inputs[txid];
        for (auto a : inputs) {
            v.emplace_back(a);
            scan.coinjoin_input_addresses.insert(Address(a));
        }
        scan.coinjoin_txids.insert(txid);
    };

    SUBCASE("no CoinJoins") {
        const auto rep = contamination_report(set, scan);
        CHECK(rep.summary.n_affected == 0);
        for (const auto& row : rep.rows) CHECK(row.ratio == 0.0);
    }
    SUBCASE("means over affected clusters") {
        add(fixture::txid(1), {"a1", "b1", "c1"});
        add(fixture::txid(2), {"b2", "c2"});
        add(fixture::txid(3), {"c3"});
        const auto rep = contamination_report(set, scan);
        CHECK(rep.summary.n_clusters == 4);
        CHECK(rep.summary.n_affected == 3);
        CHECK(rep.summary.mean_cj_txs_affected == 2.0);
        CHECK(rep.summary.mean_cj_addresses_affected == 2.0);
        CHECK(rep.summary.mean_cj_txs_all == 1.5);
        std::uint64_t total = 0;
        for (const auto& row : rep.rows) total += row.n_cj_addresses;
        CHECK(total == scan.coinjoin_input_addresses.size());
    }
    SUBCASE("provenance mismatch") {
        scan.provenance.block_hash = std::string(64, 'f');
        CHECK_THROWS_AS(contamination_report(set, scan), ValidationError);
    }
}

TEST_CASE("two wallets, one CoinJoin, naive clustering") {
    chain::SynthSpec spec;
    spec.n_wallets = 2;
    spec.addresses_min = spec.addresses_max = 1;
    spec.n_payments = 0;
    spec.seed = 1;
    spec.planted_coinjoins = {{{"w1", "w2"}, 5000}};
    const auto r = chain::generate_synthetic(spec);
    const clustering::AnalysisContext ctx{"BTC", &kClock};
    const auto set = clustering::cluster_multi_input(r.ledger, clustering::CoinJoinPolicy::naive(), ctx);
    const auto scan = scan_ledger(r.ledger, HeuristicConfig{}, "BTC", kClock);
    const auto rep = contamination_report(set, scan);
    CHECK(rep.summary.n_affected == 1);
    for (const auto& row : rep.rows) {
        if (row.n_cj_addresses == 0) continue;
        CHECK(row.n_cj_addresses == 2);
        CHECK(row.n_cj_txs == 1);
    }
}

TEST_CASE("report rendering") {
    const auto prov = evidence::make_provenance(chain::Ledger{}, "BTC", "mih/1", {{"policy", "naive"}}, kClock);
    std::vector<clustering::ClusterGroup> groups;
    for (int i = 0; i < 150; ++i) {
        clustering::ClusterGroup g;
        for (int k = 0; k <= i % 17; ++k) g.addresses.emplace_back("c" + std::to_string(i) + "_" + std::to_string(k));
        groups.push_back(std::move(g));
    }
    const clustering::ClusterSet set(groups, prov);
    ScanResult scan;
    scan.provenance = prov;
    scan.coinjoin_txids.insert(fixture::txid(1));
    scan.coinjoin_inputs[fixture::txid(1)] = {Address("c16_0"), Address("c16_1")};
    scan.coinjoin_input_addresses = {Address("c16_0"), Address("c16_1")};
    const auto rep = contamination_report(set, scan);
    const auto out = render_report(rep, 100);

    const auto rows = parse_report_csv(out.csv);
    CHECK(rows.size() == 100);
    CHECK(std::count(out.csv.begin(), out.csv.end(), '\n') == 101);
    CHECK(out.csv.rfind("rank,cluster_id,n_addresses,n_cj_addresses,n_cj_txs,ratio\n", 0) == 0);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i - 1].n_addresses >= rows[i].n_addresses);
    for (const auto& row : rows) {
        const auto it = std::find_if(rep.rows.begin(), rep.rows.end(),
                                     [&](const auto& r) { return r.cluster_id == row.cluster_id; });
        REQUIRE(it != rep.rows.end());
        CHECK(*it == row);
    }
    CHECK_THROWS_AS(render_report(rep, 0), InputError);

    const clustering::ClusterSet one({groups[3]}, prov);
    ScanResult none;
    none.provenance = prov;
    const auto single = render_report(contamination_report(one, none), 100);
    auto count = [&](std::string_view needle) {
        std::size_t n = 0;
        for (auto pos = single.svg.find(needle); pos != std::string::npos; pos = single.svg.find(needle, pos + 1)) ++n;
        return n;
    };
    CHECK(count("class=\"bar-addresses\"") == 1);
    CHECK(count("class=\"bar-coinjoin\"") == 1);
}
