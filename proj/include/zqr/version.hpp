#pragma once

namespace zqr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace zqr
