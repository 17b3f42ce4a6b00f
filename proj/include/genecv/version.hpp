#pragma once

namespace genecv {

inline constexpr const char* kVersion = "0.1.0";

} // namespace genecv
