#pragma once

namespace hwforge {

inline constexpr const char* kToolVersion = "0.1.0";

} // namespace hwforge
