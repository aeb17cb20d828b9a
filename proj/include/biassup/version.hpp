#pragma once

namespace biassup {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace biassup
