#pragma once

#include <compare>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mihkit/evidence/canonical.hpp"

namespace mihkit::sharing {

/// Absolute IRI (has a scheme such as "http:" or "urn:").
class Iri {
public:
    Iri() = default;
    /// Throws InputError unless `value` is absolute and free of whitespace.
    explicit Iri(std::string value);
    static bool is_absolute(std::string_view value) noexcept;

    const std::string& str() const noexcept { return value_; }

    friend bool operator==(const Iri&, const Iri&) = default;
    friend std::strong_ordering operator<=>(const Iri& a, const Iri& b) noexcept {
        return a.value_.compare(b.value_) <=> 0;
    }

private:
    std::string value_;
};

/// Namespace IRIs behind the JSON-LD prefixes `case:`, `vocab:` and `tool:`.
struct NamespaceContext {
    std::string case_ns = "http://case.example.org/core#";
    std::string vocab_ns = "http://case.example.org/category#";
    std::string tool_ns = "http://mihkit.example.org/id/";

    Iri case_term(std::string_view local) const { return Iri(case_ns + std::string(local)); }
    Iri vocab_term(std::string_view local) const { return Iri(vocab_ns + std::string(local)); }
    Iri tool_iri(std::string_view local) const { return Iri(tool_ns + std::string(local)); }
    evidence::Document to_jsonld_context() const;

    friend bool operator==(const NamespaceContext&, const NamespaceContext&) = default;
};

struct Term {
    std::string local_name;
    Iri iri;
    std::string definition;
};

/// Agreed-upon categorisation scheme for one entity kind.
struct Vocabulary {
    std::string name;  // "tag", "agent", "source", "action"
    Iri namespace_iri;
    std::map<std::string, Term> terms;  // by local name

    bool contains(const Iri& iri) const;
    /// Expands a local name ("Exchange") or CURIE ("vocab:Exchange") to a
    /// term IRI of this vocabulary; throws ValidationError when absent.
    Iri resolve(std::string_view name) const;
};

/// The four shipped vocabularies, in the order tag, agent, source, action.
std::vector<Vocabulary> builtin_vocabularies(const NamespaceContext& ns = {});

/// Throws InputError when no vocabulary has that name.
const Vocabulary& vocabulary(const std::vector<Vocabulary>& vocabs, std::string_view name);

/// Agent vocabulary local names usable as an agent category or reliability.
inline constexpr std::string_view kAgentCategories[] = {"Person", "Organization"};
inline constexpr std::string_view kReliabilityLevels[] = {"low", "medium", "high"};

/// Registry document listing every vocabulary and term definition.
evidence::Document vocabulary_registry(const std::vector<Vocabulary>& vocabs);

}  // namespace mihkit::sharing
