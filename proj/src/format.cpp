#include "moon/format.hpp"

#include <cstdio>

namespace moon {

std::string sig9(double value) {
  char buf[32];
  int n = std::snprintf(buf, sizeof buf, "%.9g", value);
  return std::string(buf, static_cast<std::size_t>(n));
}

}  // namespace moon
