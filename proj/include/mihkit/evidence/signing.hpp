#pragma once

#include <map>
#include <string>
#include <string_view>

#include "mihkit/evidence/canonical.hpp"
#include "mihkit/evidence/crypto.hpp"

namespace mihkit::evidence {

/// The only registered signature scheme.
inline constexpr std::string_view kEd25519 = "ed25519";

struct PublicKey {
    std::string scheme_id{kEd25519};
    std::string key_id;
    Bytes key;  // 32 bytes for ed25519
    friend bool operator==(const PublicKey&, const PublicKey&) = default;
};

class SigningKey {
public:
    /// Fresh random key.
    static SigningKey generate(std::string key_id);
    /// Deterministic key from a 32-byte seed.
    static SigningKey from_seed(std::string key_id, std::span<const std::uint8_t> seed);

    const std::string& scheme_id() const noexcept { return scheme_id_; }
    const std::string& key_id() const noexcept { return key_id_; }
    const Bytes& seed() const noexcept { return seed_; }
    PublicKey public_key() const;
    /// Detached signature over `message`.
    Bytes sign_bytes(std::string_view message) const;

private:
    std::string scheme_id_{kEd25519};
    std::string key_id_;
    Bytes seed_;
    Bytes secret_;  // libsodium expanded secret key
};

/// Scheme-agnostic signature record. The signed message is the ASCII hex
/// payload digest, so the envelope binds to the canonical payload.
struct SignatureEnvelope {
    std::string scheme_id;
    std::string key_id;
    std::string payload_digest;
    std::string signature;  // base64

    friend bool operator==(const SignatureEnvelope&, const SignatureEnvelope&) = default;
};

Document to_json(const SignatureEnvelope& env);
/// Throws InputError on a malformed envelope object.
SignatureEnvelope signature_from_json(const Document& doc);

/// Throws InputError if the key's scheme is not registered.
SignatureEnvelope sign(const Document& payload, const SigningKey& key);
SignatureEnvelope sign_digest(const std::string& payload_digest, const SigningKey& key);

/// False on any mismatch of payload, key id, or signature bytes. Throws
/// ValidationError if the envelope names an unregistered scheme.
bool verify(const SignatureEnvelope& env, const Document& payload, const PublicKey& key);
bool verify_digest(const SignatureEnvelope& env, const std::string& payload_digest,
                   const PublicKey& key);

/// Public keys known to this installation, by key id.
class KeyRing {
public:
    void add(PublicKey key) { keys_[key.key_id] = std::move(key); }
    const PublicKey* find(std::string_view key_id) const {
        auto it = keys_.find(std::string(key_id));
        return it == keys_.end() ? nullptr : &it->second;
    }
    bool empty() const noexcept { return keys_.empty(); }

private:
    std::map<std::string, PublicKey> keys_;
};

// PEM-like key files: BEGIN/END armour, "Scheme:" and "Key-Id:" headers,
// a blank line, then the base64 key material (seed or public key).
std::string write_private_key(const SigningKey& key);
SigningKey read_private_key(std::string_view text);
std::string write_public_key(const PublicKey& key);
PublicKey read_public_key(std::string_view text);

}  // namespace mihkit::evidence
