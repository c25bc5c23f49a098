#pragma once

namespace wigkit {
inline constexpr const char* version = "0.1.0";
}
