#pragma once

namespace fpvwm {

inline constexpr const char* kVersion = "0.1.0";

} // namespace fpvwm
