#pragma once

namespace setadam {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace setadam
