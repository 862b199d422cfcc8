#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mdecon {

//! shortest round-trip decimal form, independent of the C locale.
std::string
format_double(double v);

//! strict locale-independent parse; throws std::invalid_argument.
double
parse_double(std::string_view text);

std::string_view
trim(std::string_view s);

std::vector<std::string>
split(std::string_view s, char sep);

} // namespace mdecon
