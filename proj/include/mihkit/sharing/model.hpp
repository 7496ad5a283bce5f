#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mihkit/chain/address.hpp"
#include "mihkit/clustering/cluster_set.hpp"
#include "mihkit/evidence/signing.hpp"
#include "mihkit/evidence/timestamp.hpp"
#include "mihkit/sharing/vocabulary.hpp"

namespace mihkit::sharing {

struct Agent {
    Iri iri;
    std::string name;
    Iri category;                    // Person | Organization
    std::optional<Iri> reliability;  // low | medium | high

    friend bool operator==(const Agent&, const Agent&) = default;
};

struct SourceRef {
    Iri iri;
    std::string label;
    std::optional<std::string> url;
    Iri category;
    std::optional<std::string> archive_ref;     // opaque pointer to an archived copy
    std::optional<std::string> archive_digest;  // SHA-256 of that copy

    friend bool operator==(const SourceRef&, const SourceRef&) = default;
};

struct Instrument {
    std::string name;
    std::string version;

    friend bool operator==(const Instrument&, const Instrument&) = default;
};

struct InvestigativeAction {
    Iri iri;
    Iri category;
    std::string start_time;  // RFC 3339 UTC
    std::string end_time;
    std::optional<Instrument> instrument;
    std::optional<std::string> method;  // heuristic id, e.g. "mih/1"
    Agent performer;

    friend bool operator==(const InvestigativeAction&, const InvestigativeAction&) = default;
};

struct AttributionTag {
    Iri iri;
    std::string label;
    Iri category;
    chain::Address address;
    std::string currency_code;
    InvestigativeAction action;
    SourceRef source;
    std::string hash;
    std::optional<evidence::SignatureEnvelope> signature;
    std::vector<evidence::TimestampToken> timestamps;

    friend bool operator==(const AttributionTag&, const AttributionTag&) = default;
};

struct ClusterRecord {
    Iri iri;
    std::string currency_code;
    std::string block_hash;
    std::vector<chain::Address> addresses;  // strictly ascending
    std::string cluster_hash;
    std::vector<Iri> tag_refs;
    InvestigativeAction action;
    bool erroneous = false;
    std::string hash;
    std::optional<evidence::SignatureEnvelope> signature;

    friend bool operator==(const ClusterRecord&, const ClusterRecord&) = default;
};

/// The hashed description of a tag: every attribute except hash, signature
/// and timestamps, with IRIs in absolute form.
evidence::Document hash_document(const AttributionTag& tag);
/// Same for a cluster record (everything except hash and signature).
evidence::Document hash_document(const ClusterRecord& record);

/// Computes the hash, then optionally signs it and stamps it.
void seal(AttributionTag& tag, const evidence::SigningKey* key, const evidence::TimestampAuthority* tsa);
void seal(ClusterRecord& record, const evidence::SigningKey* key);

/// Record describing one cluster of `set`, with ledger state from its provenance.
ClusterRecord record_from_cluster(const clustering::ClusterSet& set, const clustering::ClusterId& id,
                                  Iri record_iri, InvestigativeAction action, std::vector<Iri> tag_refs = {});

/// Throws ValidationError when `path`'s SHA-256 differs from source.archive_digest.
void verify_archive(const SourceRef& source, const std::string& path);

}  // namespace mihkit::sharing
