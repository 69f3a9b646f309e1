#pragma once

namespace causalreg {
inline constexpr const char* kVersion = "0.1.0";
}
