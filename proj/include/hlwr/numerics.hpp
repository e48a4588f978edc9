#pragma once

#include <cmath>
#include <functional>

#include "hlwr/errors.hpp"

namespace hlwr {

/// Bisection on [lo, hi] for a sign change of f.
/// Runs until the bracket stops shrinking in floating point, so the result is
/// reproducible bit for bit. Throws NoRoot if f(lo) and f(hi) share a sign.
inline double bisect(const std::function<double(double)>& f, double lo, double hi)
{
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0)) throw NoRoot("bisect: no sign change on bracket");
    for (int it = 0; it < 2000; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Solve g(x) = target for increasing g on [lo, hi]; clamps to the ends.
inline double invert_increasing(const std::function<double(double)>& g, double target, double lo, double hi)
{
    if (target <= g(lo)) return lo;
    if (target >= g(hi)) return hi;
    return bisect([&](double x) { return g(x) - target; }, lo, hi);
}

} // namespace hlwr
