#include "openbook/format.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

namespace openbook {

std::string format_double(double value)
{
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (result.ec != std::errc{}) return "nan";
    return std::string(buffer, result.ptr);
}

} // namespace openbook
