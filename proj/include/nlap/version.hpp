#pragma once

namespace nlap {

inline constexpr const char* kVersion = "0.3.1";

}  // namespace nlap
