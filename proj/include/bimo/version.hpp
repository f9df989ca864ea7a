#pragma once

namespace bimo {

inline constexpr const char* kVersion = "0.1.0";

} // namespace bimo
