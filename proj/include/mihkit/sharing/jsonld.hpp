#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mihkit/evidence/signing.hpp"
#include "mihkit/sharing/model.hpp"
#include "mihkit/sharing/vocabulary.hpp"

namespace mihkit::sharing {

// Fixed JSON-LD profile: an inline @context with the prefixes case/vocab/tool
// and an @graph of flat nodes linked by {"@id": ...} references. No remote
// contexts, no expansion beyond prefix substitution.

/// Throws ValidationError if the tag does not validate (stale hash,
/// unresolvable category, unordered action times, ...).
std::string export_tag(const AttributionTag& tag, const NamespaceContext& ns = {},
                       const std::vector<Vocabulary>& vocabs = builtin_vocabularies());

struct ImportedTag {
    AttributionTag tag;
    std::vector<std::string> warnings;
};

/// Parses and fully validates a tag document. Integrity failures (hash,
/// cluster hash, timestamp tokens, a signature that fails under a known key)
/// are ValidationErrors; a signature under an unknown key, a missing
/// signature and missing timestamps are warnings.
ImportedTag import_tag(std::string_view bytes, const std::vector<Vocabulary>& vocabs,
                       const evidence::KeyRing& keys = {}, const NamespaceContext& ns = {});

std::string export_cluster(const ClusterRecord& record, const NamespaceContext& ns = {},
                           const std::vector<Vocabulary>& vocabs = builtin_vocabularies());

struct ImportedCluster {
    ClusterRecord record;
    std::vector<std::string> warnings;
};

ImportedCluster import_cluster(std::string_view bytes, const std::vector<Vocabulary>& vocabs,
                               const evidence::KeyRing& keys = {}, const NamespaceContext& ns = {});

/// Structural and integrity checks shared by export and import.
void check_tag(const AttributionTag& tag, const std::vector<Vocabulary>& vocabs);
void check_record(const ClusterRecord& record, const std::vector<Vocabulary>& vocabs);

}  // namespace mihkit::sharing
