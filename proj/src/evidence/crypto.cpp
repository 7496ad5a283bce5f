#include "mihkit/evidence/crypto.hpp"

#include <sodium.h>

#include <algorithm>
#include <stdexcept>

#include "mihkit/error.hpp"

namespace mihkit::evidence {

namespace {

void ensure_sodium() {
    static const bool ok = sodium_init() >= 0;
    if (!ok) throw Error("libsodium initialisation failed");
}

}  // namespace

Sha256Digest sha256(std::string_view data) {
    ensure_sodium();
    Sha256Digest out{};
    crypto_hash_sha256(out.data(), reinterpret_cast<const unsigned char*>(data.data()),
                       data.size());
    return out;
}

std::string sha256_hex(std::string_view data) {
    return to_hex(sha256(data));
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0x0f]);
    }
    return out;
}

std::string to_base64(std::span<const std::uint8_t> bytes) {
    ensure_sodium();
    const auto variant = sodium_base64_VARIANT_ORIGINAL;
    std::string out(sodium_base64_encoded_len(bytes.size(), variant), '\0');
    sodium_bin2base64(out.data(), out.size(), bytes.data(), bytes.size(), variant);
    out.resize(out.size() - 1);  // drop NUL terminator
    return out;
}

Bytes from_base64(std::string_view text) {
    ensure_sodium();
    Bytes out(text.size() / 4 * 3 + 3);
    std::size_t len = 0;
    const char* end = nullptr;
    if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), nullptr, &len, &end,
                          sodium_base64_VARIANT_ORIGINAL) != 0 ||
        end != text.data() + text.size()) {
        throw InputError("invalid base64");
    }
    out.resize(len);
    // Reject non-canonical encodings so that a decoded value maps to one text.
    if (to_base64(out) != text) throw InputError("non-canonical base64");
    return out;
}

bool is_hex64(std::string_view s) noexcept {
    return s.size() == 64 && std::all_of(s.begin(), s.end(), [](char c) {
               return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
           });
}

}  // namespace mihkit::evidence
