#pragma once

#include <cstdint>
#include <string>

#include "mihkit/chain/ledger.hpp"
#include "mihkit/evidence/canonical.hpp"
#include "mihkit/evidence/clock.hpp"

namespace mihkit::evidence {

/// Chain-of-custody context of an analysis artifact: which ledger state
/// (currency, tip block), which method and parameters, which tool, when.
struct ProvenanceRecord {
    std::string currency_code;
    std::string block_hash;
    std::int64_t block_height = -1;  // -1 for an empty ledger
    std::string method_id;
    Document method_params = Document::object();
    std::string method_params_digest;
    std::string tool_version;
    std::string created_at;

    friend bool operator==(const ProvenanceRecord&, const ProvenanceRecord&) = default;
};

/// Tip of `ledger` (zero hash, height -1 when empty) plus method identity.
ProvenanceRecord make_provenance(const chain::Ledger& ledger, std::string currency_code,
                                 std::string method_id, Document method_params,
                                 const Clock& clock);

/// Throws ValidationError when a field is empty or malformed, or when
/// method_params_digest does not recompute.
void verify_provenance(const ProvenanceRecord& p);

/// Same currency and ledger state (block hash and height).
bool same_ledger_state(const ProvenanceRecord& a, const ProvenanceRecord& b);

Document to_json(const ProvenanceRecord& p);
/// Parses and verifies.
ProvenanceRecord provenance_from_json(const Document& doc);

}  // namespace mihkit::evidence
