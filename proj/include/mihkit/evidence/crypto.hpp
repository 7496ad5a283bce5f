#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mihkit::evidence {

using Bytes = std::vector<std::uint8_t>;
using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest sha256(std::string_view data);
std::string sha256_hex(std::string_view data);

std::string to_hex(std::span<const std::uint8_t> bytes);
std::string to_base64(std::span<const std::uint8_t> bytes);
/// Throws InputError on anything that is not canonical padded base64.
Bytes from_base64(std::string_view text);

/// True for exactly 64 lowercase hex characters.
bool is_hex64(std::string_view s) noexcept;

inline const std::string kZeroHash(64, '0');

}  // namespace mihkit::evidence
