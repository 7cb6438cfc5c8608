#pragma once

namespace mtprep {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace mtprep
