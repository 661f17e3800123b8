#pragma once

#include <string>

namespace isslab {

/// Shortest-form text for CSV output: 17 significant digits, C locale.
std::string format_double(double v);

}  // namespace isslab
