#pragma once

#include <cstdio>
#include <string>

namespace swarmnet::detail {

/// Shortest-ish decimal rendering used by every CSV writer.
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace swarmnet::detail
