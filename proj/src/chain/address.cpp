#include "mihkit/chain/address.hpp"

#include <algorithm>

#include "mihkit/error.hpp"

namespace mihkit::chain {

Address::Address(std::string id) : id_(std::move(id)) {
    if (!is_valid(id_)) throw InputError("invalid address token '" + id_ + "'");
}

bool Address::is_valid(std::string_view id) noexcept {
    return !id.empty() && std::none_of(id.begin(), id.end(), [](char c) {
        const auto b = static_cast<unsigned char>(c);
        return b <= 0x20 || b == 0x7f;
    });
}

}  // namespace mihkit::chain
