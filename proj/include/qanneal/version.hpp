#pragma once

namespace qanneal {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kGeneratorVersion = "qanneal-gen-1";

}  // namespace qanneal
