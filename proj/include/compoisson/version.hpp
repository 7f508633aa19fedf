#pragma once

namespace compoisson {
inline constexpr const char* kVersion = "0.1.0";
}
