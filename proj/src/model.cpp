#include "evidence/model.hpp"

#include <cmath>
#include <cstdio>

namespace evidence {

namespace {

std::string format_endpoint(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string ParameterRegion::to_string() const {
    if (is_point()) return "point(" + format_endpoint(lower_) + ")";
    std::string s;
    s += lower_closed_ ? '[' : '(';
    s += format_endpoint(lower_);
    s += ", ";
    s += format_endpoint(upper_);
    s += upper_closed_ ? ']' : ')';
    return s;
}

} // namespace evidence
