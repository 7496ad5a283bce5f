#pragma once

namespace mihkit {

inline constexpr const char* kToolName = "mihkit";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace mihkit
