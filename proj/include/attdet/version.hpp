#pragma once

namespace attdet {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace attdet
