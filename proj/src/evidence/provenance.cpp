#include "mihkit/evidence/provenance.hpp"

#include <algorithm>

#include "mihkit/error.hpp"
#include "mihkit/evidence/crypto.hpp"
#include "mihkit/version.hpp"

namespace mihkit::evidence {

ProvenanceRecord make_provenance(const chain::Ledger& ledger, std::string currency_code,
                                 std::string method_id, Document method_params,
                                 const Clock& clock) {
    ProvenanceRecord p;
    p.currency_code = std::move(currency_code);
    if (ledger.empty()) {
        p.block_hash = kZeroHash;
        p.block_height = -1;
    } else {
        const auto tip = ledger.tip();
        p.block_hash = tip.block_hash;
        p.block_height = static_cast<std::int64_t>(tip.height);
    }
    p.method_id = std::move(method_id);
    p.method_params_digest = canonical_digest(method_params);
    p.method_params = std::move(method_params);
    p.tool_version = std::string(kToolName) + "/" + kToolVersion;
    p.created_at = format_rfc3339(clock.now());
    verify_provenance(p);
    return p;
}

void verify_provenance(const ProvenanceRecord& p) {
    const bool currency_ok =
        !p.currency_code.empty() && p.currency_code.size() <= 10 &&
        std::all_of(p.currency_code.begin(), p.currency_code.end(),
                    [](char c) { return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'); });
    if (!currency_ok) throw ValidationError("currency code must be a short uppercase string");
    if (!is_hex64(p.block_hash)) throw ValidationError("provenance block hash must be 64 lowercase hex");
    if (p.method_id.empty() || p.tool_version.empty()) throw ValidationError("provenance fields must be non-empty");
    try {
        parse_rfc3339(p.created_at);
        if (canonical_digest(p.method_params) != p.method_params_digest) {
            throw ValidationError("method_params_digest does not match the parameter document");
        }
    } catch (const InputError& e) {
        throw ValidationError(e.what());
    }
}

bool same_ledger_state(const ProvenanceRecord& a, const ProvenanceRecord& b) {
    return a.currency_code == b.currency_code && a.block_hash == b.block_hash &&
           a.block_height == b.block_height;
}

Document to_json(const ProvenanceRecord& p) {
    return {{"currency_code", p.currency_code},
            {"block_hash", p.block_hash},
            {"block_height", p.block_height},
            {"method_id", p.method_id},
            {"method_params", p.method_params},
            {"method_params_digest", p.method_params_digest},
            {"tool_version", p.tool_version},
            {"created_at", p.created_at}};
}

ProvenanceRecord provenance_from_json(const Document& doc) {
    ProvenanceRecord p;
    try {
        p.currency_code = doc.at("currency_code").get<std::string>();
        p.block_hash = doc.at("block_hash").get<std::string>();
        p.block_height = doc.at("block_height").get<std::int64_t>();
        p.method_id = doc.at("method_id").get<std::string>();
        p.method_params = doc.at("method_params");
        p.method_params_digest = doc.at("method_params_digest").get<std::string>();
        p.tool_version = doc.at("tool_version").get<std::string>();
        p.created_at = doc.at("created_at").get<std::string>();
    } catch (const Document::exception& e) {
        throw ValidationError(std::string("malformed provenance record: ") + e.what());
    }
    verify_provenance(p);
    return p;
}

}  // namespace mihkit::evidence
