#pragma once

namespace hktl {
inline constexpr const char* kVersion = "0.1.0";
}
