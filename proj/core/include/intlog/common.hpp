#pragma once

#include <string>

namespace intlog {

// Numerical tolerance used by construction-time validation. Distinct from the
// proof parameter epsilon carried by instances and statement checks.
inline constexpr double kDefaultTol = 1e-9;

// Shortest decimal representation that parses back to the same double.
std::string format_real(double value);

}  // namespace intlog
