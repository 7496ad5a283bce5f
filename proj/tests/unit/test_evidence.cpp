#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "mihkit/error.hpp"
#include "mihkit/evidence/audit.hpp"
#include "mihkit/evidence/canonical.hpp"
#include "mihkit/evidence/clock.hpp"
#include "mihkit/evidence/crypto.hpp"
#include "mihkit/evidence/provenance.hpp"
#include "mihkit/evidence/signing.hpp"
#include "mihkit/evidence/timestamp.hpp"

using namespace mihkit;
using namespace mihkit::evidence;

namespace {

const FixedClock kClock(parse_rfc3339("2020-01-01T00:00:00Z"));
const AgentRef kActor{"http://mihkit.example.org/id/agent/alice", "alice"};

SigningKey test_key(std::string id, std::uint8_t fill = 7) {
    Bytes seed(32, fill);
    return SigningKey::from_seed(std::move(id), seed);
}

AuditLog random_log(std::mt19937_64& rng, std::size_t n) {
    AuditLog log;
    for (std::size_t i = 0; i < n; ++i) {
        Document detail{{"n", rng() % 1000}, {"note", "entry " + std::to_string(i)}, {"ok", (rng() & 1) == 1}};
        log.append(kActor, audit_action("test"), "target-" + std::to_string(rng() % 10), detail, kClock);
    }
    return log;
}

}  // namespace

TEST_CASE("sha256 against independently computed values") {
    CHECK(sha256_hex("A") == fixture::kSha256_A);
    CHECK(canonical_digest(Document::object()) == fixture::kSha256_EmptyObject);
}

TEST_CASE("canonical serialisation") {
    CHECK(canonical_serialize(Document::parse(R"({"b":1,"a":2})")) == R"({"a":2,"b":1})");
    CHECK(canonical_digest(Document::parse(R"({"b":1,"a":2})")) ==
          canonical_digest(Document::parse("{ \"a\" : 2,\n \"b\" : 1 }")));
    CHECK(canonical_serialize(Document::parse(R"({"x":[1,-2,true,null,"é"]})")) == "{\"x\":[1,-2,true,null,\"é\"]}");
    CHECK_THROWS_AS(canonical_digest(Document::parse(R"({"x":1.5})")), InputError);
    CHECK_THROWS_AS(canonical_digest(Document::parse(R"([[{"deep":0.0}]])")), InputError);
    // byte-wise key order puts upper case before lower case
    CHECK(canonical_serialize(Document::parse(R"({"b":0,"B":0,"a":0})")) == R"({"B":0,"a":0,"b":0})");
}

TEST_CASE("rfc3339") {
    CHECK(format_rfc3339(parse_rfc3339("2024-02-29T23:59:59Z")) == "2024-02-29T23:59:59Z");
    CHECK_THROWS_AS(parse_rfc3339("2024-02-30T00:00:00Z"), InputError);
    CHECK_THROWS_AS(parse_rfc3339("2024-01-01 00:00:00"), InputError);
    CHECK_THROWS_AS(parse_rfc3339("2024-01-01T00:00:00+01:00"), InputError);
}

TEST_CASE("audit log") {
    AuditLog log;
    CHECK(verify_audit(log).ok);
    const auto first = log.append(kActor, audit_action("ingest"), "ledger.jsonl", {{"k", 1}}, kClock);
    CHECK(first.seq == 0);
    CHECK(first.prev_hash == std::string(64, '0'));
    CHECK(first.timestamp == "2020-01-01T00:00:00Z");
    CHECK(first.entry_hash == canonical_digest(audit_body(first)));
    const auto second = log.append(kActor, audit_action("cluster"), "clusters.json", {{"k", 2}}, kClock);
    CHECK(second.seq == 1);
    CHECK(second.prev_hash == first.entry_hash);
    CHECK(AuditLog::from_text(log.text()).entry(1) == second);

    SUBCASE("append to a tampered log fails") {
        auto text = log.text();
        text[text.find("\"k\":1") + 4] = '7';
        auto tampered = AuditLog::from_text(text);
        CHECK_FALSE(verify_audit(tampered).ok);
        CHECK(verify_audit(tampered).first_bad_seq == 0);
        CHECK_THROWS_AS(tampered.append(kActor, audit_action("x"), "t", {}, kClock), IntegrityError);
    }
    SUBCASE("floats are refused in details") {
        CHECK_THROWS_AS(log.append(kActor, audit_action("x"), "t", {{"f", 0.5}}, kClock), InputError);
        CHECK(log.size() == 2);
    }
}

TEST_CASE("audit byte flips are located") {
    std::mt19937_64 rng(4);
    auto log = random_log(rng, 10);
    CHECK(verify_audit(log).ok);
    const auto text = log.text();
    // a flip anywhere in entry 4 (including its newline) is reported as seq 4
    std::size_t start = 0;
    for (int i = 0; i < 4; ++i) start = text.find('\n', start) + 1;
    const std::size_t end = text.find('\n', start);
    for (std::size_t pos = start; pos <= end; ++pos) {
        auto t = text;
        t[pos] = static_cast<char>(t[pos] ^ 0x01);
        const auto v = verify_audit(AuditLog::from_text(t));
        CHECK_FALSE(v.ok);
        CHECK(v.first_bad_seq == 4);
    }
    // reordering or dropping entries is detected too
    auto lines = log.lines();
    std::swap(lines[2], lines[3]);
    std::string swapped;
    for (const auto& l : lines) swapped += l + "\n";
    CHECK(verify_audit(AuditLog::from_text(swapped)).first_bad_seq == 2);
}

TEST_CASE("audit log file appends") {
    const auto dir = fixture::temp_dir("audit");
    {
        AuditLogFile f(dir / "audit.jsonl");
        f.append(kActor, audit_action("a"), "t", {}, kClock);
    }
    AuditLogFile g(dir / "audit.jsonl");
    CHECK(g.log().size() == 1);
    g.append(kActor, audit_action("b"), "t", {}, kClock);
    AuditLogFile h(dir / "audit.jsonl");
    CHECK(h.log().size() == 2);
    CHECK(verify_audit(h.log()).ok);
    std::filesystem::remove_all(dir);
}

TEST_CASE("signatures") {
    const auto key = test_key("agency-1");
    const Document payload{{"cluster", "abc"}, {"n", 3}};
    const auto env = sign(payload, key);
    CHECK(env.scheme_id == "ed25519");
    CHECK(env.key_id == "agency-1");
    CHECK(env.payload_digest == canonical_digest(payload));
    CHECK(verify(env, payload, key.public_key()));

    Document altered = payload;
    altered["n"] = 4;
    CHECK_FALSE(verify(env, altered, key.public_key()));
    CHECK_FALSE(verify(env, payload, test_key("agency-1", 8).public_key()));

    auto bad_sig = env;
    auto raw = from_base64(bad_sig.signature);
    raw[0] ^= 1;
    bad_sig.signature = to_base64(raw);
    CHECK_FALSE(verify(bad_sig, payload, key.public_key()));

    auto rot13 = env;
    rot13.scheme_id = "rot13";
    CHECK_THROWS_AS(verify(rot13, payload, key.public_key()), ValidationError);
    CHECK(signature_from_json(to_json(env)) == env);

    // deterministic for a fixed seed
    CHECK(sign(payload, test_key("agency-1")).signature == env.signature);
}

TEST_CASE("key files") {
    const auto key = test_key("k-1");
    const auto back = read_private_key(write_private_key(key));
    CHECK(back.key_id() == "k-1");
    CHECK(back.seed() == key.seed());
    const auto pub = read_public_key(write_public_key(key.public_key()));
    CHECK(pub == key.public_key());
    CHECK(write_public_key(pub).find("-----BEGIN MIHKIT PUBLIC KEY-----") == 0);
    CHECK_THROWS_AS(read_public_key("garbage"), InputError);
    auto text = write_public_key(pub);
    text.replace(text.find("Scheme: ed25519"), 15, "Scheme: rot13");
    CHECK_THROWS_AS(read_public_key(text), InputError);
}

TEST_CASE("timestamps") {
    const std::string digest = sha256_hex("payload");
    const LocalAuthority local(kClock);
    const auto t = local.stamp(digest);
    CHECK(t.authority_id == "local");
    CHECK(t.time == "2020-01-01T00:00:00Z");
    CHECK(t.token_digest == timestamp_token_digest(t.time, "local", digest));
    CHECK(local.stamp(digest) == t);
    CHECK(verify_timestamp(t, digest));
    CHECK_FALSE(verify_timestamp(t, sha256_hex("other")));
    auto moved = t;
    moved.time = "2020-01-02T00:00:00Z";
    CHECK_FALSE(verify_timestamp(moved, digest));
    CHECK(timestamp(digest, "local", kClock) == t);
    CHECK_THROWS_AS(timestamp(digest, "tsa.example.org", kClock), ValidationError);
    CHECK(timestamp_from_json(to_json(t)) == t);
}

TEST_CASE("provenance") {
    const auto l = fixture::fig1a();
    const Document params{{"policy", "naive"}};
    const auto p = make_provenance(l, "BTC", "mih/1", params, kClock);
    CHECK(p.block_hash == l.tip().block_hash);
    CHECK(p.block_height == 1);
    CHECK(p.method_params_digest == canonical_digest(params));
    CHECK(p.tool_version == "mihkit/0.1.0");
    CHECK(p.created_at == "2020-01-01T00:00:00Z");
    CHECK_NOTHROW(verify_provenance(p));
    CHECK(provenance_from_json(to_json(p)) == p);

    auto bad = p;
    bad.method_params = Document{{"policy", "exclude"}};
    CHECK_THROWS_AS(verify_provenance(bad), ValidationError);
    bad = p;
    bad.currency_code = "btc";
    CHECK_THROWS_AS(verify_provenance(bad), ValidationError);

    const auto empty = make_provenance(chain::Ledger{}, "ETH", "mih/1", params, kClock);
    CHECK(empty.block_height == -1);
    CHECK(empty.block_hash == std::string(64, '0'));
}
