#pragma once

namespace lle {

inline constexpr const char* kToolVersion = "0.3.0";

}  // namespace lle
