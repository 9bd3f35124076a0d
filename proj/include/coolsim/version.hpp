#pragma once

namespace coolsim {
inline constexpr const char* kVersion = "0.1.0";
}
