#pragma once

namespace csd {

inline constexpr const char* kVersionString = "1.0.0";

}  // namespace csd
