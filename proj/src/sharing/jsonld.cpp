#include "mihkit/sharing/jsonld.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <span>

#include "mihkit/error.hpp"
#include "mihkit/evidence/clock.hpp"
#include "mihkit/evidence/crypto.hpp"

namespace mihkit::sharing {

using evidence::Document;

namespace {

// ---------------------------------------------------------------- checks

void check_currency(const std::string& code) {
    const bool ok = !code.empty() && code.size() <= 10 && std::all_of(code.begin(), code.end(), [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
    });
    if (!ok) throw ValidationError("currency code '" + code + "' must be a short uppercase string");
}

void require_term(const Vocabulary& v, const Iri& iri, std::span<const std::string_view> allowed = {}) {
    bool ok = v.contains(iri);
    if (ok && !allowed.empty()) {
        ok = std::any_of(allowed.begin(), allowed.end(),
                         [&](std::string_view local) { return v.terms.at(std::string(local)).iri == iri; });
    }
    if (!ok) throw ValidationError("unknown " + v.name + " category IRI " + iri.str());
}

void check_action(const InvestigativeAction& a, const std::vector<Vocabulary>& vocabs) {
    require_term(vocabulary(vocabs, "action"), a.category);
    const auto& agents = vocabulary(vocabs, "agent");
    require_term(agents, a.performer.category, kAgentCategories);
    if (a.performer.reliability) require_term(agents, *a.performer.reliability, kReliabilityLevels);
    if (a.performer.name.empty()) throw ValidationError("agent name must not be empty");
    try {
        if (evidence::parse_rfc3339(a.start_time) > evidence::parse_rfc3339(a.end_time)) {
            throw ValidationError("action ends before it starts");
        }
    } catch (const InputError& e) {
        throw ValidationError(e.what());
    }
}

void check_signature(const std::optional<evidence::SignatureEnvelope>& sig, const std::string& hash) {
    if (!sig) return;
    if (sig->scheme_id != evidence::kEd25519) {
        throw ValidationError("unknown signature scheme '" + sig->scheme_id + "'");
    }
    if (sig->payload_digest != hash) throw ValidationError("signature does not cover the document hash");
}

void verify_signature(const std::optional<evidence::SignatureEnvelope>& sig, const std::string& hash,
                      const evidence::KeyRing& keys, std::vector<std::string>& warnings) {
    if (!sig) {
        warnings.push_back("document is unsigned; authenticity not established");
        return;
    }
    const auto* key = keys.find(sig->key_id);
    if (!key) {
        warnings.push_back("signature key '" + sig->key_id + "' is unknown; authenticity not verified");
        return;
    }
    if (!evidence::verify_digest(*sig, hash, *key)) {
        throw ValidationError("signature verification failed under key '" + sig->key_id + "'");
    }
}

// ---------------------------------------------------------------- writing

class Writer {
public:
    explicit Writer(const NamespaceContext& ns) : ns_(ns) {}

    std::string compact(const Iri& iri) const {
        const std::string& s = iri.str();
        for (const auto& [prefix, base] : {std::pair{"case", &ns_.case_ns}, std::pair{"vocab", &ns_.vocab_ns},
                                           std::pair{"tool", &ns_.tool_ns}}) {
            if (s.size() > base->size() && s.starts_with(*base)) return std::string(prefix) + ":" + s.substr(base->size());
        }
        return s;
    }
    Document ref(const Iri& iri) const { return {{"@id", compact(iri)}}; }
    static std::string key(std::string_view local) { return "case:" + std::string(local); }

    Document signature(const evidence::SignatureEnvelope& s) const {
        return {{"@type", key("Signature")},
                {key("scheme"), s.scheme_id},
                {key("keyId"), s.key_id},
                {key("payloadDigest"), s.payload_digest},
                {key("signatureValue"), s.signature}};
    }

    Document agent(const Agent& a) const {
        Document n{{"@id", compact(a.iri)},
                   {"@type", key("Investigator")},
                   {key("name"), a.name},
                   {key("category"), ref(a.category)}};
        if (a.reliability) n[key("reliability")] = ref(*a.reliability);
        return n;
    }

    Document action(const InvestigativeAction& a) const {
        Document n{{"@id", compact(a.iri)},
                   {"@type", key("InvestigativeAction")},
                   {key("category"), ref(a.category)},
                   {key("startTime"), a.start_time},
                   {key("endTime"), a.end_time},
                   {key("performer"), ref(a.performer.iri)}};
        if (a.instrument) {
            n[key("instrument")] = {{"@type", key("Tool")},
                                    {key("name"), a.instrument->name},
                                    {key("version"), a.instrument->version}};
        }
        if (a.method) n[key("method")] = *a.method;
        return n;
    }

    Document source(const SourceRef& s) const {
        Document n{{"@id", compact(s.iri)},
                   {"@type", key("Source")},
                   {key("label"), s.label},
                   {key("category"), ref(s.category)}};
        if (s.url) n[key("url")] = *s.url;
        if (s.archive_ref) n[key("archiveRef")] = *s.archive_ref;
        if (s.archive_digest) n[key("archiveDigest")] = *s.archive_digest;
        return n;
    }

private:
    const NamespaceContext& ns_;
};

std::string finish(Document graph, const NamespaceContext& ns) {
    Document doc{{"@context", ns.to_jsonld_context()}, {"@graph", std::move(graph)}};
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------- reading

/// Properties of one JSON-LD object with keys expanded to case-namespace
/// local names. Unknown or duplicate-after-expansion keys are rejected.
class Props {
public:
    Props(const Document& obj, const std::map<std::string, std::string>& prefixes, const NamespaceContext& ns,
          std::string where, std::initializer_list<std::string_view> required,
          std::initializer_list<std::string_view> optional)
        : prefixes_(prefixes), ns_(ns), where_(std::move(where)) {
        if (!obj.is_object()) throw ValidationError(where_ + ": expected an object");
        for (const auto& [k, v] : obj.items()) {
            if (k == "@id" || k == "@type") continue;
            const std::string full = expand(k, prefixes_);
            if (!full.starts_with(ns_.case_ns)) throw ValidationError(where_ + ": unknown property " + k);
            std::string local = full.substr(ns_.case_ns.size());
            const bool known = std::find(required.begin(), required.end(), local) != required.end() ||
                               std::find(optional.begin(), optional.end(), local) != optional.end();
            if (!known) throw ValidationError(where_ + ": unknown property " + k);
            if (!props_.emplace(std::move(local), &v).second) throw ValidationError(where_ + ": duplicate property " + k);
        }
        for (auto r : required) {
            if (!props_.contains(std::string(r))) {
                throw ValidationError(where_ + ": missing required field case:" + std::string(r));
            }
        }
    }

    static std::string expand(std::string_view term, const std::map<std::string, std::string>& prefixes) {
        const auto colon = term.find(':');
        if (colon != std::string_view::npos) {
            if (auto it = prefixes.find(std::string(term.substr(0, colon))); it != prefixes.end()) {
                return it->second + std::string(term.substr(colon + 1));
            }
        }
        if (!Iri::is_absolute(term)) throw ValidationError("term '" + std::string(term) + "' has no absolute IRI");
        return std::string(term);
    }

    const Document* get(std::string_view local) const {
        auto it = props_.find(std::string(local));
        return it == props_.end() ? nullptr : it->second;
    }

    std::string literal(std::string_view local) const {
        const auto* v = get(local);
        if (!v || !v->is_string()) throw ValidationError(where_ + ": case:" + std::string(local) + " must be a string");
        return v->get<std::string>();
    }

    std::optional<std::string> opt_literal(std::string_view local) const {
        if (!get(local)) return std::nullopt;
        return literal(local);
    }

    Iri iri_ref(const Document& v, std::string_view what) const {
        if (!v.is_object() || v.size() != 1 || !v.contains("@id") || !v["@id"].is_string()) {
            throw ValidationError(where_ + ": " + std::string(what) + " must be an {\"@id\": ...} reference");
        }
        return Iri(expand(v["@id"].get<std::string>(), prefixes_));
    }

    Iri iri(std::string_view local) const {
        const auto* v = get(local);
        if (!v) throw ValidationError(where_ + ": missing required field case:" + std::string(local));
        return iri_ref(*v, "case:" + std::string(local));
    }

    std::optional<Iri> opt_iri(std::string_view local) const {
        if (!get(local)) return std::nullopt;
        return iri(local);
    }

    void require_type(const Document& obj, std::string_view local) const {
        const auto it = obj.find("@type");
        if (it == obj.end() || !it->is_string() || expand(it->get<std::string>(), prefixes_) != ns_.case_ns + std::string(local)) {
            throw ValidationError(where_ + ": expected @type case:" + std::string(local));
        }
    }

private:
    const std::map<std::string, std::string>& prefixes_;
    const NamespaceContext& ns_;
    std::string where_;
    std::map<std::string, const Document*> props_;
};

class GraphReader {
public:
    GraphReader(std::string_view bytes, const NamespaceContext& ns) : ns_(ns) {
        try {
            doc_ = Document::parse(bytes);
        } catch (const Document::exception& e) {
            throw ValidationError(std::string("malformed document: ") + e.what());
        }
        if (!doc_.is_object() || doc_.size() != 2 || !doc_.contains("@context") || !doc_.contains("@graph")) {
            throw ValidationError("document must have exactly @context and @graph");
        }
        const auto& ctx = doc_["@context"];
        if (!ctx.is_object()) throw ValidationError("@context must be an inline object");
        for (const auto& [prefix, base] : ctx.items()) {
            if (!base.is_string() || !Iri::is_absolute(base.get<std::string>())) {
                throw ValidationError("@context prefix '" + prefix + "' must map to an absolute IRI");
            }
            prefixes_[prefix] = base.get<std::string>();
        }
        const auto& graph = doc_["@graph"];
        if (!graph.is_array()) throw ValidationError("@graph must be an array");
        for (const auto& node : graph) {
            if (!node.is_object() || !node.contains("@id") || !node["@id"].is_string() || !node.contains("@type")) {
                throw ValidationError("every @graph node needs @id and @type");
            }
            const std::string id = Props::expand(node["@id"].get<std::string>(), prefixes_);
            if (!nodes_.emplace(id, &node).second) throw ValidationError("duplicate node " + id);
        }
    }

    /// The single node of the given type.
    const Document& single(std::string_view type_local) {
        const Document* found = nullptr;
        const std::string type = ns_.case_ns + std::string(type_local);
        for (const auto& [id, node] : nodes_) {
            if (Props::expand((*node)["@type"].get<std::string>(), prefixes_) == type) {
                if (found) throw ValidationError("more than one case:" + std::string(type_local) + " node");
                found = node;
                used_.insert(id);
            }
        }
        if (!found) throw ValidationError("no case:" + std::string(type_local) + " node");
        return *found;
    }

    const Document& node(const Iri& id, std::string_view what) {
        auto it = nodes_.find(id.str());
        if (it == nodes_.end()) throw ValidationError(std::string(what) + " reference " + id.str() + " does not resolve");
        used_.insert(id.str());
        return *it->second;
    }

    void require_all_used() const {
        for (const auto& [id, node] : nodes_) {
            if (!used_.contains(id)) throw ValidationError("unreferenced node " + id);
        }
    }

    Iri id_of(const Document& node) const { return Iri(Props::expand(node["@id"].get<std::string>(), prefixes_)); }

    const std::map<std::string, std::string>& prefixes() const { return prefixes_; }
    const NamespaceContext& ns() const { return ns_; }

private:
    Document doc_;
    const NamespaceContext& ns_;
    std::map<std::string, std::string> prefixes_;
    std::map<std::string, const Document*> nodes_;
    std::set<std::string> used_;
};

evidence::SignatureEnvelope read_signature(const GraphReader& g, const Document& obj) {
    Props p(obj, g.prefixes(), g.ns(), "signature", {"scheme", "keyId", "payloadDigest", "signatureValue"}, {});
    p.require_type(obj, "Signature");
    return {p.literal("scheme"), p.literal("keyId"), p.literal("payloadDigest"), p.literal("signatureValue")};
}

Agent read_agent(GraphReader& g, const Iri& id) {
    const auto& n = g.node(id, "performer");
    Props p(n, g.prefixes(), g.ns(), "agent " + id.str(), {"name", "category"}, {"reliability"});
    p.require_type(n, "Investigator");
    return {id, p.literal("name"), p.iri("category"), p.opt_iri("reliability")};
}

InvestigativeAction read_action(GraphReader& g, const Iri& id) {
    const auto& n = g.node(id, "action");
    Props p(n, g.prefixes(), g.ns(), "action " + id.str(), {"category", "startTime", "endTime", "performer"},
            {"instrument", "method"});
    p.require_type(n, "InvestigativeAction");
    InvestigativeAction a;
    a.iri = id;
    a.category = p.iri("category");
    a.start_time = p.literal("startTime");
    a.end_time = p.literal("endTime");
    if (const auto* inst = p.get("instrument")) {
        Props ip(*inst, g.prefixes(), g.ns(), "instrument", {"name", "version"}, {});
        ip.require_type(*inst, "Tool");
        a.instrument = Instrument{ip.literal("name"), ip.literal("version")};
    }
    a.method = p.opt_literal("method");
    a.performer = read_agent(g, p.iri("performer"));
    return a;
}

SourceRef read_source(GraphReader& g, const Iri& id) {
    const auto& n = g.node(id, "source");
    Props p(n, g.prefixes(), g.ns(), "source " + id.str(), {"label", "category"},
            {"url", "archiveRef", "archiveDigest"});
    p.require_type(n, "Source");
    return {id, p.literal("label"), p.opt_literal("url"), p.iri("category"), p.opt_literal("archiveRef"),
            p.opt_literal("archiveDigest")};
}

template <typename Fn>
auto as_validation(Fn&& fn) {
    try {
        return fn();
    } catch (const ValidationError&) {
        throw;
    } catch (const InputError& e) {
        throw ValidationError(e.what());
    } catch (const Document::exception& e) {
        throw ValidationError(std::string("malformed document: ") + e.what());
    }
}

}  // namespace

void check_tag(const AttributionTag& tag, const std::vector<Vocabulary>& vocabs) {
    if (tag.label.empty()) throw ValidationError("tag label must not be empty");
    require_term(vocabulary(vocabs, "tag"), tag.category);
    check_currency(tag.currency_code);
    check_action(tag.action, vocabs);
    require_term(vocabulary(vocabs, "source"), tag.source.category);
    if (tag.source.archive_digest && !evidence::is_hex64(*tag.source.archive_digest)) {
        throw ValidationError("archive digest must be 64 lowercase hex");
    }
    if (evidence::canonical_digest(hash_document(tag)) != tag.hash) {
        throw ValidationError("tag hash mismatch: document content does not match case:hash");
    }
    check_signature(tag.signature, tag.hash);
    for (const auto& ts : tag.timestamps) {
        if (!evidence::verify_timestamp(ts, tag.hash)) throw ValidationError("timestamp token does not verify");
    }
}

void check_record(const ClusterRecord& r, const std::vector<Vocabulary>& vocabs) {
    check_currency(r.currency_code);
    if (!evidence::is_hex64(r.block_hash)) throw ValidationError("block hash must be 64 lowercase hex");
    if (r.addresses.empty()) throw ValidationError("cluster record has no addresses");
    for (std::size_t i = 1; i < r.addresses.size(); ++i) {
        if (!(r.addresses[i - 1] < r.addresses[i])) {
            throw ValidationError("cluster addresses are not strictly sorted");
        }
    }
    if (clustering::cluster_hash(r.addresses) != r.cluster_hash) {
        throw ValidationError("cluster hash mismatch: addresses do not hash to case:clusterHash");
    }
    check_action(r.action, vocabs);
    if (evidence::canonical_digest(hash_document(r)) != r.hash) {
        throw ValidationError("record hash mismatch: document content does not match case:hash");
    }
    check_signature(r.signature, r.hash);
}

std::string export_tag(const AttributionTag& tag, const NamespaceContext& ns, const std::vector<Vocabulary>& vocabs) {
    check_tag(tag, vocabs);
    Writer w(ns);
    Document n{{"@id", w.compact(tag.iri)},
               {"@type", Writer::key("Tag")},
               {Writer::key("label"), tag.label},
               {Writer::key("category"), w.ref(tag.category)},
               {Writer::key("address"), tag.address.str()},
               {Writer::key("currency"), tag.currency_code},
               {Writer::key("action"), w.ref(tag.action.iri)},
               {Writer::key("source"), w.ref(tag.source.iri)},
               {Writer::key("hash"), tag.hash}};
    if (tag.signature) n[Writer::key("signature")] = w.signature(*tag.signature);
    Document stamps = Document::array();
    for (const auto& t : tag.timestamps) {
        stamps.push_back({{"@type", Writer::key("Timestamp")},
                          {Writer::key("time"), t.time},
                          {Writer::key("authority"), t.authority_id},
                          {Writer::key("tokenDigest"), t.token_digest}});
    }
    n[Writer::key("timestamps")] = std::move(stamps);
    return finish({std::move(n), w.action(tag.action), w.agent(tag.action.performer), w.source(tag.source)}, ns);
}

ImportedTag import_tag(std::string_view bytes, const std::vector<Vocabulary>& vocabs, const evidence::KeyRing& keys,
                       const NamespaceContext& ns) {
    return as_validation([&] {
        GraphReader g(bytes, ns);
        const auto& n = g.single("Tag");
        Props p(n, g.prefixes(), ns, "tag",
                {"label", "category", "address", "currency", "action", "source", "hash", "timestamps"}, {"signature"});
        ImportedTag out;
        auto& t = out.tag;
        t.iri = g.id_of(n);
        t.label = p.literal("label");
        t.category = p.iri("category");
        t.address = chain::Address(p.literal("address"));
        t.currency_code = p.literal("currency");
        t.action = read_action(g, p.iri("action"));
        t.source = read_source(g, p.iri("source"));
        t.hash = p.literal("hash");
        if (const auto* sig = p.get("signature")) t.signature = read_signature(g, *sig);
        const auto* stamps = p.get("timestamps");
        if (!stamps->is_array()) throw ValidationError("case:timestamps must be an array");
        for (const auto& s : *stamps) {
            Props sp(s, g.prefixes(), ns, "timestamp", {"time", "authority", "tokenDigest"}, {});
            sp.require_type(s, "Timestamp");
            t.timestamps.push_back({sp.literal("time"), sp.literal("authority"), sp.literal("tokenDigest")});
        }
        g.require_all_used();

        check_tag(t, vocabs);
        verify_signature(t.signature, t.hash, keys, out.warnings);
        if (t.timestamps.empty()) out.warnings.push_back("tag carries no trusted timestamp");
        return out;
    });
}

std::string export_cluster(const ClusterRecord& record, const NamespaceContext& ns,
                           const std::vector<Vocabulary>& vocabs) {
    check_record(record, vocabs);
    Writer w(ns);
    Document addrs = Document::array();
    for (const auto& a : record.addresses) addrs.push_back(a.str());
    Document tags = Document::array();
    for (const auto& t : record.tag_refs) tags.push_back(w.ref(t));
    Document n{{"@id", w.compact(record.iri)},
               {"@type", Writer::key("Cluster")},
               {Writer::key("currency"), record.currency_code},
               {Writer::key("blockHash"), record.block_hash},
               {Writer::key("addresses"), std::move(addrs)},
               {Writer::key("clusterHash"), record.cluster_hash},
               {Writer::key("tags"), std::move(tags)},
               {Writer::key("action"), w.ref(record.action.iri)},
               {Writer::key("erroneous"), record.erroneous},
               {Writer::key("hash"), record.hash}};
    if (record.signature) n[Writer::key("signature")] = w.signature(*record.signature);
    return finish({std::move(n), w.action(record.action), w.agent(record.action.performer)}, ns);
}

ImportedCluster import_cluster(std::string_view bytes, const std::vector<Vocabulary>& vocabs,
                               const evidence::KeyRing& keys, const NamespaceContext& ns) {
    return as_validation([&] {
        GraphReader g(bytes, ns);
        const auto& n = g.single("Cluster");
        Props p(n, g.prefixes(), ns, "cluster",
                {"currency", "blockHash", "addresses", "clusterHash", "tags", "action", "erroneous", "hash"},
                {"signature"});
        ImportedCluster out;
        auto& r = out.record;
        r.iri = g.id_of(n);
        r.currency_code = p.literal("currency");
        r.block_hash = p.literal("blockHash");
        const auto* addrs = p.get("addresses");
        if (!addrs->is_array()) throw ValidationError("case:addresses must be an array");
        for (const auto& a : *addrs) {
            if (!a.is_string()) throw ValidationError("addresses must be strings");
            r.addresses.emplace_back(a.get<std::string>());
        }
        r.cluster_hash = p.literal("clusterHash");
        const auto* tags = p.get("tags");
        if (!tags->is_array()) throw ValidationError("case:tags must be an array");
        for (const auto& t : *tags) r.tag_refs.push_back(p.iri_ref(t, "tag reference"));
        r.action = read_action(g, p.iri("action"));
        const auto* err = p.get("erroneous");
        if (!err->is_boolean()) throw ValidationError("case:erroneous must be a boolean");
        r.erroneous = err->get<bool>();
        r.hash = p.literal("hash");
        if (const auto* sig = p.get("signature")) r.signature = read_signature(g, *sig);
        g.require_all_used();

        check_record(r, vocabs);
        verify_signature(r.signature, r.hash, keys, out.warnings);
        return out;
    });
}

}  // namespace mihkit::sharing
