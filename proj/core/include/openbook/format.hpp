#pragma once

#include <string>

namespace openbook {

/// Shortest decimal representation that round-trips (at most 17 significant
/// digits); "inf"/"-inf"/"nan" for non-finite values.
[[nodiscard]] std::string format_double(double value);

} // namespace openbook
