#pragma once

#include <string>

#include "json.hpp"

namespace mihkit::evidence {

using Document = nlohmann::json;

/// Canonical text of a float-free document: object keys sorted byte-wise,
/// no insignificant whitespace, UTF-8, integers in shortest decimal form.
/// Throws InputError if the document holds a float or invalid UTF-8.
std::string canonical_serialize(const Document& doc);

/// Lowercase hex SHA-256 of canonical_serialize(doc).
std::string canonical_digest(const Document& doc);

}  // namespace mihkit::evidence
