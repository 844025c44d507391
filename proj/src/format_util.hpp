#pragma once

#include <cstdio>
#include <string>

namespace degldp::detail {

// 17 significant digits: enough for any binary64 to round-trip through text.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace degldp::detail
