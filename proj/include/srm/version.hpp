#pragma once

namespace srm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace srm
