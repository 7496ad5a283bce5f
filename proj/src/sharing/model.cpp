#include "mihkit/sharing/model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mihkit/error.hpp"
#include "mihkit/evidence/crypto.hpp"

namespace mihkit::sharing {

using evidence::Document;

namespace {

Document agent_doc(const Agent& a) {
    Document d{{"iri", a.iri.str()}, {"name", a.name}, {"category", a.category.str()}};
    if (a.reliability) d["reliability"] = a.reliability->str();
    return d;
}

Document action_doc(const InvestigativeAction& a) {
    Document d{{"iri", a.iri.str()},
               {"category", a.category.str()},
               {"start_time", a.start_time},
               {"end_time", a.end_time},
               {"performer", agent_doc(a.performer)}};
    if (a.instrument) d["instrument"] = {{"name", a.instrument->name}, {"version", a.instrument->version}};
    if (a.method) d["method"] = *a.method;
    return d;
}

Document source_doc(const SourceRef& s) {
    Document d{{"iri", s.iri.str()}, {"label", s.label}, {"category", s.category.str()}};
    if (s.url) d["url"] = *s.url;
    if (s.archive_ref) d["archive_ref"] = *s.archive_ref;
    if (s.archive_digest) d["archive_digest"] = *s.archive_digest;
    return d;
}

}  // namespace

Document hash_document(const AttributionTag& t) {
    return {{"type", "Tag"},
            {"iri", t.iri.str()},
            {"label", t.label},
            {"category", t.category.str()},
            {"address", t.address.str()},
            {"currency_code", t.currency_code},
            {"action", action_doc(t.action)},
            {"source", source_doc(t.source)}};
}

Document hash_document(const ClusterRecord& r) {
    Document addrs = Document::array();
    for (const auto& a : r.addresses) addrs.push_back(a.str());
    Document tags = Document::array();
    for (const auto& t : r.tag_refs) tags.push_back(t.str());
    return {{"type", "Cluster"},
            {"iri", r.iri.str()},
            {"currency_code", r.currency_code},
            {"block_hash", r.block_hash},
            {"addresses", std::move(addrs)},
            {"cluster_hash", r.cluster_hash},
            {"tag_refs", std::move(tags)},
            {"action", action_doc(r.action)},
            {"erroneous", r.erroneous}};
}

void seal(AttributionTag& tag, const evidence::SigningKey* key, const evidence::TimestampAuthority* tsa) {
    tag.hash = evidence::canonical_digest(hash_document(tag));
    tag.signature.reset();
    tag.timestamps.clear();
    if (key) tag.signature = evidence::sign_digest(tag.hash, *key);
    if (tsa) tag.timestamps.push_back(tsa->stamp(tag.hash));
}

void seal(ClusterRecord& record, const evidence::SigningKey* key) {
    record.hash = evidence::canonical_digest(hash_document(record));
    record.signature.reset();
    if (key) record.signature = evidence::sign_digest(record.hash, *key);
}

ClusterRecord record_from_cluster(const clustering::ClusterSet& set, const clustering::ClusterId& id,
                                  Iri record_iri, InvestigativeAction action, std::vector<Iri> tag_refs) {
    const auto* c = set.cluster(id);
    if (!c) throw ValidationError("unknown cluster " + id.str());
    ClusterRecord r;
    r.iri = std::move(record_iri);
    r.currency_code = set.provenance().currency_code;
    r.block_hash = set.provenance().block_hash;
    r.addresses = c->addresses;
    r.cluster_hash = id.str();
    r.tag_refs = std::move(tag_refs);
    std::sort(r.tag_refs.begin(), r.tag_refs.end());
    r.action = std::move(action);
    r.erroneous = c->meta.erroneous;
    return r;
}

void verify_archive(const SourceRef& source, const std::string& path) {
    if (!source.archive_digest) return;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("archive " + path + " is not readable");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (evidence::sha256_hex(buf.str()) != *source.archive_digest) {
        throw ValidationError("archive " + path + " does not match archive_digest");
    }
}

}  // namespace mihkit::sharing
