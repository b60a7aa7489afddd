#pragma once

namespace clab {
inline constexpr const char* kVersion = "0.1.0";
}
