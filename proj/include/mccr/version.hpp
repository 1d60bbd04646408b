#pragma once

namespace mccr {
inline constexpr const char* kVersion = "0.1.0";
}
