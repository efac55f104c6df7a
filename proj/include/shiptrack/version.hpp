#pragma once

namespace shiptrack {

inline constexpr const char* kToolName = "shiptrack";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace shiptrack
