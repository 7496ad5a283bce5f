#pragma once

#include <string>
#include <string_view>

#include "mihkit/evidence/canonical.hpp"
#include "mihkit/evidence/clock.hpp"

namespace mihkit::evidence {

struct TimestampToken {
    std::string time;  // RFC 3339 UTC
    std::string authority_id;
    std::string token_digest;  // binds (authority, payload digest, time)

    friend bool operator==(const TimestampToken&, const TimestampToken&) = default;
};

Document to_json(const TimestampToken& t);
TimestampToken timestamp_from_json(const Document& doc);

/// canonical_digest of {"authority", "payload_digest", "time"}.
std::string timestamp_token_digest(std::string_view time, std::string_view authority_id,
                                   std::string_view payload_digest);

/// Plug-in point for time-stamping authorities (e.g. an RFC 3161 client).
class TimestampAuthority {
public:
    virtual ~TimestampAuthority() = default;
    virtual std::string id() const = 0;
    virtual TimestampToken stamp(std::string_view payload_digest) const = 0;
};

/// Stamps with an injected clock. Authority id "local".
class LocalAuthority final : public TimestampAuthority {
public:
    explicit LocalAuthority(const Clock& clock) : clock_(clock) {}
    std::string id() const override { return "local"; }
    TimestampToken stamp(std::string_view payload_digest) const override;

private:
    const Clock& clock_;
};

/// Stamps `payload_digest` with the named authority. Only "local" ships;
/// any other id raises ValidationError (authority unavailable).
TimestampToken timestamp(std::string_view payload_digest, std::string_view authority_id,
                         const Clock& clock);

bool verify_timestamp(const TimestampToken& token, std::string_view payload_digest);

}  // namespace mihkit::evidence
