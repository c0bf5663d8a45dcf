#pragma once

namespace adiawkb {

inline constexpr const char* version_string = "0.1.0";

} // namespace adiawkb
