#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace vulnbench {

/// Half-up rounding to `digits` decimals. The 1e-9 nudge keeps decimal
/// ties such as 12.7405 from rounding down through binary representation.
inline double round_half_up(double value, int digits = 3) {
  const double scale = std::pow(10.0, digits);
  return std::floor(value * scale + 0.5 + 1e-9) / scale;
}

/// Three-decimal fixed rendering of a half-up rounded value.
inline std::string format_fixed3(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", round_half_up(value, 3));
  return buf;
}

}  // namespace vulnbench
