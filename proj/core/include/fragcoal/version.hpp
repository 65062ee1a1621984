#pragma once

namespace fragcoal {
inline constexpr const char* kVersion = "0.1.0";
}
