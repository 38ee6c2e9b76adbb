#pragma once

namespace rlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace rlab
