#pragma once

#include <cmath>
#include <vector>

namespace switchgrid {

// State points and small dense vectors. Dimensions stay tiny (d <= 3), so
// plain std::vector arithmetic is all we need.
using Point = std::vector<double>;

inline double dot(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

inline double norm2(const Point& a) { return std::sqrt(dot(a, a)); }

inline Point sub(const Point& a, const Point& b) {
    Point r(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] - b[k];
    return r;
}

inline double dist2(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return std::sqrt(s);
}

inline bool all_finite(const Point& a) {
    for (double x : a)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace switchgrid
