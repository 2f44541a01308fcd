#pragma once

namespace rrat {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rrat
