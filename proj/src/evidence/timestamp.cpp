#include "mihkit/evidence/timestamp.hpp"

#include "mihkit/error.hpp"
#include "mihkit/evidence/crypto.hpp"

namespace mihkit::evidence {

Document to_json(const TimestampToken& t) {
    return {{"time", t.time}, {"authority_id", t.authority_id}, {"token_digest", t.token_digest}};
}

TimestampToken timestamp_from_json(const Document& doc) {
    if (!doc.is_object() || doc.size() != 3) throw InputError("malformed timestamp token");
    try {
        return {doc.at("time").get<std::string>(), doc.at("authority_id").get<std::string>(),
                doc.at("token_digest").get<std::string>()};
    } catch (const Document::exception& e) {
        throw InputError(std::string("malformed timestamp token: ") + e.what());
    }
}

std::string timestamp_token_digest(std::string_view time, std::string_view authority_id,
                                   std::string_view payload_digest) {
    return canonical_digest({{"authority", authority_id},
                             {"payload_digest", payload_digest},
                             {"time", time}});
}

TimestampToken LocalAuthority::stamp(std::string_view payload_digest) const {
    if (!is_hex64(payload_digest)) throw InputError("payload digest must be 64 lowercase hex");
    TimestampToken t;
    t.time = format_rfc3339(clock_.now());
    t.authority_id = id();
    t.token_digest = timestamp_token_digest(t.time, t.authority_id, payload_digest);
    return t;
}

TimestampToken timestamp(std::string_view payload_digest, std::string_view authority_id,
                         const Clock& clock) {
    if (authority_id != "local") {
        throw ValidationError("time-stamping authority '" + std::string(authority_id) + "' unavailable");
    }
    return LocalAuthority(clock).stamp(payload_digest);
}

bool verify_timestamp(const TimestampToken& token, std::string_view payload_digest) {
    try {
        parse_rfc3339(token.time);
    } catch (const InputError&) {
        return false;
    }
    return !token.authority_id.empty() &&
           token.token_digest == timestamp_token_digest(token.time, token.authority_id, payload_digest);
}

}  // namespace mihkit::evidence
