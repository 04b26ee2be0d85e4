#include "iabsim/util.hpp"

#include <cstdio>
#include <cstdlib>

namespace iabsim {

std::string to_hex_float(double value) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%a", value);
    return buf;
}

double from_hex_float(const std::string& text) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end != begin + text.size()) {
        throw std::invalid_argument("not a hex float: '" + text + "'");
    }
    return value;
}

}  // namespace iabsim
