#pragma once

#include <string>

namespace moon {

/// Shortest round-trip-free rendering with 9 significant digits ("%.9g").
std::string sig9(double value);

}  // namespace moon
