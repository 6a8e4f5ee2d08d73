#pragma once

namespace msg {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace msg
