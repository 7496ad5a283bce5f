#pragma once

#include <compare>
#include <functional>
#include <string>
#include <string_view>

namespace mihkit::chain {

/// Opaque address token. Non-empty, no whitespace or control bytes;
/// equality and ordering are byte-wise on the UTF-8 encoding.
class Address {
public:
    Address() = default;
    /// Throws InputError when `id` is not a valid address token.
    explicit Address(std::string id);

    static bool is_valid(std::string_view id) noexcept;

    const std::string& str() const noexcept { return id_; }

    friend bool operator==(const Address&, const Address&) = default;
    friend std::strong_ordering operator<=>(const Address& a, const Address& b) noexcept {
        return a.id_.compare(b.id_) <=> 0;
    }

private:
    std::string id_;
};

}  // namespace mihkit::chain

template <>
struct std::hash<mihkit::chain::Address> {
    std::size_t operator()(const mihkit::chain::Address& a) const noexcept {
        return std::hash<std::string>{}(a.str());
    }
};
