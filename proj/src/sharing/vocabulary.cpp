#include "mihkit/sharing/vocabulary.hpp"

#include <algorithm>

#include "mihkit/error.hpp"

namespace mihkit::sharing {

Iri::Iri(std::string value) : value_(std::move(value)) {
    if (!is_absolute(value_)) throw InputError("'" + value_ + "' is not an absolute IRI");
}

bool Iri::is_absolute(std::string_view v) noexcept {
    const auto colon = v.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == v.size()) return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
    if (!alpha(v[0])) return false;
    for (std::size_t i = 1; i < colon; ++i) {
        const char c = v[i];
        if (!alpha(c) && !(c >= '0' && c <= '9') && c != '+' && c != '-' && c != '.') return false;
    }
    return std::none_of(v.begin(), v.end(), [](char c) {
        const auto b = static_cast<unsigned char>(c);
        return b <= 0x20 || b == 0x7f || c == '<' || c == '>' || c == '"';
    });
}

evidence::Document NamespaceContext::to_jsonld_context() const {
    return {{"case", case_ns}, {"vocab", vocab_ns}, {"tool", tool_ns}};
}

bool Vocabulary::contains(const Iri& iri) const {
    return std::any_of(terms.begin(), terms.end(), [&](const auto& kv) { return kv.second.iri == iri; });
}

Iri Vocabulary::resolve(std::string_view name) const {
    if (name.starts_with("vocab:")) name.remove_prefix(6);
    if (auto it = terms.find(std::string(name)); it != terms.end()) return it->second.iri;
    if (Iri::is_absolute(name) && contains(Iri(std::string(name)))) return Iri(std::string(name));
    throw ValidationError("'" + std::string(name) + "' is not a term of the " + this->name + " vocabulary");
}

std::vector<Vocabulary> builtin_vocabularies(const NamespaceContext& ns) {
    auto make = [&](std::string name, std::initializer_list<std::pair<const char*, const char*>> terms) {
        Vocabulary v{std::move(name), Iri(ns.vocab_ns), {}};
        for (const auto& [local, definition] : terms) {
            v.terms.emplace(local, Term{local, ns.vocab_term(local), definition});
        }
        return v;
    };
    return {
        make("tag",
             {{"Organization", "A real-world organisation controlling the address."},
              {"Individual", "A natural person controlling the address."},
              {"Exchange", "A service exchanging cryptocurrency against other assets."},
              {"WalletProvider", "A service holding keys on behalf of its users."},
              {"Miner", "A mining operation or pool."},
              {"Marketplace", "A (possibly darknet) market accepting cryptocurrency."}}),
        make("agent",
             {{"Person", "An individual investigator."},
              {"Organization", "An agency or organisation acting as a whole."},
              {"low", "Agent reliability: low."},
              {"medium", "Agent reliability: medium."},
              {"high", "Agent reliability: high."}}),
        make("source",
             {{"Website", "A page or site on the public web."},
              {"DataDump", "A data dump, e.g. extracted from seized devices."},
              {"Device", "A physical device examined directly."},
              {"TorHiddenService", "A Tor onion service."}}),
        make("action",
             {{"ManualEntry", "Information entered by hand by an investigator."},
              {"Crawl", "Information collected by an automated crawler."},
              {"Clustering", "Addresses grouped by a named clustering heuristic."}}),
    };
}

const Vocabulary& vocabulary(const std::vector<Vocabulary>& vocabs, std::string_view name) {
    for (const auto& v : vocabs) {
        if (v.name == name) return v;
    }
    throw InputError("no '" + std::string(name) + "' vocabulary loaded");
}

evidence::Document vocabulary_registry(const std::vector<Vocabulary>& vocabs) {
    evidence::Document list = evidence::Document::array();
    for (const auto& v : vocabs) {
        evidence::Document terms = evidence::Document::array();
        for (const auto& [local, t] : v.terms) {
            terms.push_back({{"@id", t.iri.str()}, {"name", local}, {"definition", t.definition}});
        }
        list.push_back({{"name", v.name}, {"namespace", v.namespace_iri.str()}, {"terms", std::move(terms)}});
    }
    return {{"vocabularies", std::move(list)}};
}

}  // namespace mihkit::sharing
