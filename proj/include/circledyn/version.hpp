#pragma once

namespace circledyn {
inline constexpr const char* kVersion = "0.1.0";
}
