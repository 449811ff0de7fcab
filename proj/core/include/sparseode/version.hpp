#pragma once

namespace sparseode {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sparseode
