#pragma once

namespace framelet {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace framelet
