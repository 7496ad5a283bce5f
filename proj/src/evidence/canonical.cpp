#include "mihkit/evidence/canonical.hpp"

#include "mihkit/error.hpp"
#include "mihkit/evidence/crypto.hpp"

namespace mihkit::evidence {

namespace {

void reject_floats(const Document& doc) {
    switch (doc.type()) {
        case Document::value_t::number_float:
            throw InputError("canonical documents may not contain floating-point numbers");
        case Document::value_t::binary:
            throw InputError("canonical documents may not contain binary values");
        case Document::value_t::array:
        case Document::value_t::object:
            for (const auto& v : doc) reject_floats(v);
            break;
        default:
            break;
    }
}

}  // namespace

std::string canonical_serialize(const Document& doc) {
    reject_floats(doc);
    try {
        // nlohmann's object_t is a std::map, so keys already iterate in
        // byte-wise order; dump() without indent emits no whitespace.
        return doc.dump();
    } catch (const Document::type_error& e) {
        throw InputError(std::string("document is not valid UTF-8: ") + e.what());
    }
}

std::string canonical_digest(const Document& doc) {
    return sha256_hex(canonical_serialize(doc));
}

}  // namespace mihkit::evidence
