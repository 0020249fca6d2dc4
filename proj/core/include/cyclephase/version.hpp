#pragma once

namespace cyclephase {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cyclephase
