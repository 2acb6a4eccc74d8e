#pragma once

#include <string>
#include <string_view>

namespace chj {

/// Decimal text with 17 significant digits; parses back to the same double.
std::string format_double(double v);

/// Strict double parse of the whole string; throws InvalidArgument on junk.
double parse_double(std::string_view text);

}  // namespace chj
