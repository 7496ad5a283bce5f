#include <algorithm>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "mihkit/chain/synth.hpp"
#include "mihkit/clustering/cluster_set.hpp"
#include "mihkit/clustering/clustering.hpp"
#include "mihkit/coinjoin/detect.hpp"
#include "mihkit/error.hpp"
#include "mihkit/evidence/audit.hpp"
#include "mihkit/evidence/clock.hpp"
#include "oracles.hpp"

using namespace mihkit;
using namespace mihkit::clustering;
using chain::Address;

namespace {

const evidence::FixedClock kClock(evidence::parse_rfc3339("2024-01-01T00:00:00Z"));
const AnalysisContext kCtx{"BTC", &kClock};
const evidence::AgentRef kActor{"http://mihkit.example.org/id/agent/alice", "alice"};

std::vector<Address> addrs(std::initializer_list<const char*> names) {
    std::vector<Address> v;
    for (auto n : names) v.emplace_back(n);
    return v;
}

chain::SynthSpec planted_spec(std::uint64_t seed) {
    chain::SynthSpec s;
    s.n_wallets = 6;
    s.addresses_min = 1;
    s.addresses_max = 3;
    s.n_payments = 60;
    s.fee_rate = 5;
    s.seed = seed;
    s.planted_coinjoins = {{{"w1", "w2", "w3"}, 1'000'000}};
    return s;
}

}  // namespace

TEST_CASE("cluster hash") {
    CHECK(cluster_hash(addrs({"A"})) == fixture::kSha256_A);
    CHECK(cluster_hash(addrs({"A", "B", "C", "D"})) == fixture::kSha256_ABCD);
    CHECK(cluster_hash(addrs({"D", "B", "A", "C"})) == fixture::kSha256_ABCD);
    CHECK(cluster_hash(addrs({"A", "B"})) == cluster_hash(addrs({"B", "A"})));
    CHECK(cluster_hash(addrs({"A", "B"})) != cluster_hash(addrs({"A", "C"})));
    CHECK_THROWS_AS(cluster_hash(std::vector<Address>{}), InputError);
    CHECK_THROWS_AS(cluster_hash(addrs({"A", "A"})), InputError);
}

TEST_CASE("Fig. 1a, naive") {
    const auto l = fixture::fig1a();
    const auto set = cluster_multi_input(l, CoinJoinPolicy::naive(), kCtx);
    const auto abcd = ClusterId(std::string(fixture::kSha256_ABCD));
    REQUIRE(set.cluster(abcd));
    CHECK(set.cluster(abcd)->addresses == addrs({"A", "B", "C", "D"}));
    CHECK(set.find(Address("A")) == abcd);
    CHECK(set.find(Address("D")) == abcd);
    CHECK_FALSE(set.find(Address("unknown")).has_value());
    // output-only addresses are singletons
    CHECK(set.find(Address("E")) == ClusterId::of(addrs({"E"})));
    CHECK(set.size() == 3);
    CHECK(set.provenance().method_id == kMethodId);
    CHECK(set.provenance().block_hash == l.tip().block_hash);
    CHECK(set.provenance().created_at == "2024-01-01T00:00:00Z");
}

TEST_CASE("single one-input payment gives a singleton") {
    chain::Ledger l;
    l.append_block(0, fixture::hex_of(1), 0);
    l.append_transaction({fixture::txid(1), 0, {{Address("X"), 10}}, {{Address("Y"), 9}}});
    const auto set = cluster_multi_input(l, CoinJoinPolicy::naive(), kCtx);
    CHECK(set.cluster(ClusterId::of(addrs({"X"}))));
    CHECK(set.size() == 2);
}

TEST_CASE("empty ledger clusters to an empty set") {
    const auto set = cluster_multi_input(chain::Ledger{}, CoinJoinPolicy::naive(), kCtx);
    CHECK(set.size() == 0);
    CHECK(set.provenance().block_height == -1);
}

TEST_CASE("naive clustering equals connected components") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 60; ++i) {
        const auto l = fixture::random_graph_ledger(rng, rng() % 60);
        const auto set = cluster_multi_input(l, CoinJoinPolicy::naive(), kCtx);
        CHECK(oracle::partition_of(set) == oracle::components(l));
    }
}

TEST_CASE("exclude policy equals components without CoinJoins; mark flags") {
    std::mt19937_64 rng(7);
    coinjoin::HeuristicConfig h;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto r = chain::generate_synthetic(planted_spec(seed));
        const auto naive = cluster_multi_input(r.ledger, CoinJoinPolicy::naive(), kCtx);
        const auto excl = cluster_multi_input(r.ledger, CoinJoinPolicy::exclude(h), kCtx);
        const auto mark = cluster_multi_input(r.ledger, CoinJoinPolicy::mark(h), kCtx);
        CHECK(oracle::partition_of(excl) ==
              oracle::components(r.ledger, [&](const chain::Transaction& tx) { return coinjoin::detect_structural(tx); }));
        CHECK(oracle::partition_of(mark) == oracle::partition_of(naive));

        // every Exclude cluster lies inside one Naive cluster
        for (const auto& [id, c] : excl.clusters()) {
            const auto home = naive.find(c.addresses.front());
            for (const auto& a : c.addresses) CHECK(naive.find(a) == home);
        }
        CHECK(excl.size() >= naive.size());

        // Exclude keeps the wallets apart and is perfectly precise here
        const auto pe = evaluate(excl, r.truth);
        const auto pn = evaluate(naive, r.truth);
        CHECK(pe.pairwise_precision == 1.0);
        CHECK(pe.pairwise_precision >= pn.pairwise_precision);

        std::size_t flagged = 0;
        for (const auto& [id, c] : mark.clusters()) flagged += c.meta.contains_coinjoin;
        CHECK(flagged >= 1);
    }
}

TEST_CASE("cluster ids are stable and content-derived") {
    auto l = fixture::fig1a();
    const auto a = cluster_multi_input(l, CoinJoinPolicy::naive(), kCtx);
    const auto b = cluster_multi_input(l, CoinJoinPolicy::naive(), kCtx);
    CHECK(export_cluster_set(a) == export_cluster_set(b));
    CHECK(import_cluster_set(export_cluster_set(a)) == a);

    // a new transaction joining E and F changes only their clusters' ids
    l.append_block(2, fixture::hex_of(102), 0);
    l.append_transaction({fixture::txid(9), 2, {{Address("E"), 60}, {Address("F"), 120}}, {{Address("G"), 100}}});
    const auto c = cluster_multi_input(l, CoinJoinPolicy::naive(), kCtx);
    CHECK(c.cluster(ClusterId(std::string(fixture::kSha256_ABCD))));
    CHECK(c.cluster(ClusterId::of(addrs({"E", "F"}))));
    CHECK_FALSE(c.cluster(ClusterId::of(addrs({"E"}))));
}

TEST_CASE("cluster set import rejects inconsistent documents") {
    const auto set = cluster_multi_input(fixture::fig1a(), CoinJoinPolicy::naive(), kCtx);
    auto doc = to_json(set);
    SUBCASE("wrong id") {
        doc["clusters"][0]["id"] = std::string(64, 'a');
        CHECK_THROWS_AS(cluster_set_from_json(doc), ValidationError);
    }
    SUBCASE("address in two clusters") {
        doc["clusters"][1]["addresses"].push_back(doc["clusters"][0]["addresses"][0]);
        CHECK_THROWS(cluster_set_from_json(doc));
    }
    SUBCASE("tampered params digest") {
        doc["provenance"]["method_params_digest"] = std::string(64, 'b');
        CHECK_THROWS_AS(cluster_set_from_json(doc), ValidationError);
    }
}

TEST_CASE("rectify") {
    const auto set = cluster_multi_input(fixture::fig1a(), CoinJoinPolicy::naive(), kCtx);
    evidence::AuditLog log;

    SUBCASE("exclude A from {A,B,C,D}") {
        const auto out = rectify(set, Address("A"), RectifyAction::ExcludeAddress, "mis-tagged exchange", kActor, log, kClock);
        const auto bcd = ClusterId(std::string(fixture::kSha256_BCD));
        REQUIRE(out.clusters.cluster(bcd));
        CHECK(out.clusters.cluster(bcd)->addresses == addrs({"B", "C", "D"}));
        const auto a = out.clusters.find(Address("A"));
        REQUIRE(a);
        CHECK(*a == ClusterId(std::string(fixture::kSha256_A)));
        CHECK(out.clusters.cluster(*a)->meta.excluded_addresses.contains(Address("A")));
        CHECK(log.size() == 1);
        CHECK(out.entry.detail["reason"] == "mis-tagged exchange");
        CHECK(out.entry.detail["before"] == std::vector<std::string>{std::string(fixture::kSha256_ABCD)});
        CHECK(evidence::verify_audit(log).ok);
    }
    SUBCASE("mark then unmark is an involution") {
        const auto id = ClusterId(std::string(fixture::kSha256_ABCD));
        const auto marked = rectify(set, id, RectifyAction::MarkErroneous, "bad link", kActor, log, kClock);
        CHECK(marked.clusters.cluster(id)->meta.erroneous);
        const auto back = rectify(marked.clusters, id, RectifyAction::UnmarkErroneous, "reviewed", kActor, log, kClock);
        CHECK(back.clusters.cluster(id)->meta == set.cluster(id)->meta);
        CHECK(log.size() == 2);
        CHECK(log.entry(1).prev_hash == log.entry(0).entry_hash);
    }
    SUBCASE("errors leave no audit entry") {
        CHECK_THROWS_AS(rectify(set, Address("nobody"), RectifyAction::ExcludeAddress, "x", kActor, log, kClock),
                        ValidationError);
        CHECK_THROWS_AS(rectify(set, Address("A"), RectifyAction::ExcludeAddress, "", kActor, log, kClock),
                        ValidationError);
        CHECK(log.empty());
    }
    SUBCASE("a broken log refuses the append") {
        rectify(set, Address("A"), RectifyAction::ExcludeAddress, "x", kActor, log, kClock);
        auto text = log.text();
        text[text.find("\"x\"") + 1] = 'y';
        auto broken = evidence::AuditLog::from_text(text);
        CHECK_THROWS_AS(rectify(set, Address("B"), RectifyAction::ExcludeAddress, "x", kActor, broken, kClock),
                        IntegrityError);
    }
}

TEST_CASE("evaluate") {
    const auto l = fixture::fig1a();
    const auto set = cluster_multi_input(l, CoinJoinPolicy::naive(), kCtx);

    chain::GroundTruth exact;
    for (const auto& [id, c] : set.clusters()) {
        exact.wallets["w" + id.str().substr(0, 8)] = std::set<Address>(c.addresses.begin(), c.addresses.end());
    }
    const auto m = evaluate(set, exact);
    CHECK(m.pairwise_precision == 1.0);
    CHECK(m.pairwise_recall == 1.0);
    CHECK(m.linked_fraction == 1.0);

    // all singletons against a multi-address truth
    chain::Ledger singles;
    singles.append_block(0, fixture::hex_of(1), 0);
    singles.append_transaction({fixture::txid(1), 0, {}, {{Address("A"), 1}, {Address("B"), 1}, {Address("C"), 1}}});
    const auto s = cluster_multi_input(singles, CoinJoinPolicy::naive(), kCtx);
    chain::GroundTruth truth;
    truth.wallets["w1"] = {Address("A"), Address("B"), Address("C")};
    const auto ms = evaluate(s, truth);
    CHECK(ms.pairwise_precision == 1.0);
    CHECK(ms.pairwise_recall == 0.0);
    CHECK(ms.linked_fraction == 0.0);

    // hand-computed: clusters {A,B,C,D}; truth {A,B} {C} {D}
    chain::GroundTruth split;
    split.wallets["w1"] = {Address("A"), Address("B")};
    split.wallets["w2"] = {Address("C")};
    split.wallets["w3"] = {Address("D")};
    const auto mh = evaluate(set, split);
    CHECK(mh.pairwise_precision == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(mh.pairwise_recall == 1.0);
    CHECK(mh.linked_fraction == 1.0);

    chain::GroundTruth unknown;
    unknown.wallets["w1"] = {Address("nope")};
    CHECK_THROWS_AS(evaluate(set, unknown), ValidationError);
}
