#pragma once

namespace mehler {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mehler
