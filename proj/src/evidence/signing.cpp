#include "mihkit/evidence/signing.hpp"

#include <sodium.h>

#include <sstream>

#include "mihkit/error.hpp"

namespace mihkit::evidence {

namespace {

constexpr std::string_view kPrivateLabel = "MIHKIT PRIVATE KEY";
constexpr std::string_view kPublicLabel = "MIHKIT PUBLIC KEY";

void require_scheme(std::string_view scheme) {
    if (scheme != kEd25519) throw InputError("unknown signature scheme '" + std::string(scheme) + "'");
}

std::string armour(std::string_view label, std::string_view scheme, std::string_view key_id,
                   std::span<const std::uint8_t> material) {
    std::ostringstream out;
    out << "-----BEGIN " << label << "-----\n"
        << "Scheme: " << scheme << "\n"
        << "Key-Id: " << key_id << "\n\n"
        << to_base64(material) << "\n"
        << "-----END " << label << "-----\n";
    return out.str();
}

struct Armoured {
    std::string scheme;
    std::string key_id;
    Bytes material;
};

Armoured unarmour(std::string_view text, std::string_view label) {
    std::istringstream in{std::string(text)};
    std::string line;
    auto next = [&]() {
        if (!std::getline(in, line)) throw InputError("truncated key file");
        return line;
    };
    if (next() != "-----BEGIN " + std::string(label) + "-----") throw InputError("not a " + std::string(label));
    Armoured a;
    auto header = [&](std::string_view name) {
        const std::string l = next();
        if (l.rfind(std::string(name) + ": ", 0) != 0) throw InputError("missing " + std::string(name) + " header");
        return l.substr(name.size() + 2);
    };
    a.scheme = header("Scheme");
    a.key_id = header("Key-Id");
    if (a.key_id.empty()) throw InputError("empty Key-Id");
    if (!next().empty()) throw InputError("expected blank line after key headers");
    a.material = from_base64(next());
    if (next() != "-----END " + std::string(label) + "-----") throw InputError("missing END line");
    require_scheme(a.scheme);
    return a;
}

}  // namespace

SigningKey SigningKey::generate(std::string key_id) {
    if (sodium_init() < 0) throw Error("libsodium initialisation failed");
    Bytes seed(crypto_sign_SEEDBYTES);
    randombytes_buf(seed.data(), seed.size());
    return from_seed(std::move(key_id), seed);
}

SigningKey SigningKey::from_seed(std::string key_id, std::span<const std::uint8_t> seed) {
    if (sodium_init() < 0) throw Error("libsodium initialisation failed");
    if (seed.size() != crypto_sign_SEEDBYTES) throw InputError("ed25519 seed must be 32 bytes");
    if (key_id.empty()) throw InputError("key id must not be empty");
    SigningKey k;
    k.key_id_ = std::move(key_id);
    k.seed_.assign(seed.begin(), seed.end());
    k.secret_.resize(crypto_sign_SECRETKEYBYTES);
    Bytes pk(crypto_sign_PUBLICKEYBYTES);
    crypto_sign_seed_keypair(pk.data(), k.secret_.data(), k.seed_.data());
    return k;
}

PublicKey SigningKey::public_key() const {
    Bytes pk(crypto_sign_PUBLICKEYBYTES);
    crypto_sign_ed25519_sk_to_pk(pk.data(), secret_.data());
    return {scheme_id_, key_id_, std::move(pk)};
}

Bytes SigningKey::sign_bytes(std::string_view message) const {
    Bytes sig(crypto_sign_BYTES);
    crypto_sign_detached(sig.data(), nullptr, reinterpret_cast<const unsigned char*>(message.data()),
                         message.size(), secret_.data());
    return sig;
}

Document to_json(const SignatureEnvelope& env) {
    return {{"scheme_id", env.scheme_id},
            {"key_id", env.key_id},
            {"payload_digest", env.payload_digest},
            {"signature", env.signature}};
}

SignatureEnvelope signature_from_json(const Document& doc) {
    if (!doc.is_object() || doc.size() != 4) throw InputError("malformed signature envelope");
    try {
        return {doc.at("scheme_id").get<std::string>(), doc.at("key_id").get<std::string>(),
                doc.at("payload_digest").get<std::string>(), doc.at("signature").get<std::string>()};
    } catch (const Document::exception& e) {
        throw InputError(std::string("malformed signature envelope: ") + e.what());
    }
}

SignatureEnvelope sign(const Document& payload, const SigningKey& key) {
    return sign_digest(canonical_digest(payload), key);
}

SignatureEnvelope sign_digest(const std::string& payload_digest, const SigningKey& key) {
    require_scheme(key.scheme_id());
    if (!is_hex64(payload_digest)) throw InputError("payload digest must be 64 lowercase hex");
    return {key.scheme_id(), key.key_id(), payload_digest, to_base64(key.sign_bytes(payload_digest))};
}

bool verify(const SignatureEnvelope& env, const Document& payload, const PublicKey& key) {
    return verify_digest(env, canonical_digest(payload), key);
}

bool verify_digest(const SignatureEnvelope& env, const std::string& payload_digest,
                   const PublicKey& key) {
    if (env.scheme_id != kEd25519) {
        throw ValidationError("unknown signature scheme '" + env.scheme_id + "'");
    }
    if (key.scheme_id != env.scheme_id || key.key_id != env.key_id) return false;
    if (env.payload_digest != payload_digest) return false;
    if (key.key.size() != crypto_sign_PUBLICKEYBYTES) return false;
    Bytes sig;
    try {
        sig = from_base64(env.signature);
    } catch (const InputError&) {
        return false;
    }
    if (sig.size() != crypto_sign_BYTES) return false;
    return crypto_sign_verify_detached(sig.data(),
                                       reinterpret_cast<const unsigned char*>(payload_digest.data()),
                                       payload_digest.size(), key.key.data()) == 0;
}

std::string write_private_key(const SigningKey& key) {
    return armour(kPrivateLabel, key.scheme_id(), key.key_id(), key.seed());
}

SigningKey read_private_key(std::string_view text) {
    auto a = unarmour(text, kPrivateLabel);
    return SigningKey::from_seed(std::move(a.key_id), a.material);
}

std::string write_public_key(const PublicKey& key) {
    return armour(kPublicLabel, key.scheme_id, key.key_id, key.key);
}

PublicKey read_public_key(std::string_view text) {
    auto a = unarmour(text, kPublicLabel);
    if (a.material.size() != crypto_sign_PUBLICKEYBYTES) throw InputError("ed25519 public key must be 32 bytes");
    return {std::move(a.scheme), std::move(a.key_id), std::move(a.material)};
}

}  // namespace mihkit::evidence
