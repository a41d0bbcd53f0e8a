#pragma once

namespace sdcc {

inline constexpr const char* kToolName = "sdcc";
inline constexpr const char* kVersion = "0.1.0";

} // namespace sdcc
