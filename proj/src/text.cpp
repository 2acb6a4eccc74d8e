#include "chj/text.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

#include "chj/types.hpp"

namespace chj {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(std::string_view text) {
    std::string s(text);
    const auto first = s.find_first_not_of(" \t\r\n");
    const auto last = s.find_last_not_of(" \t\r\n");
    if (first == std::string::npos) throw InvalidArgument("empty number");
    s = s.substr(first, last - first + 1);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw InvalidArgument("not a number: '" + s + "'");
    return v;
}

}  // namespace chj
