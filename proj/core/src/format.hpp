#pragma once

#include <cstdio>
#include <string>

namespace tpinv::detail {

// Compact number for diagnostics.
inline std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace tpinv::detail
