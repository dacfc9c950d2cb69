#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

namespace cocomp {

struct Minimum {
    double x = 0.0;
    double value = std::numeric_limits<double>::infinity();
};

/// Golden-section search for a convex (unimodal) function on [lo, hi].
///
/// Stops once the bracket is narrower than `tolerance`; the endpoints are
/// compared against the interior result so boundary minima are exact.
template <class F>
Minimum golden_section(F&& f, double lo, double hi, double tolerance) {
    if (hi < lo) std::swap(lo, hi);
    Minimum best{lo, f(lo)};
    if (hi - lo <= 0.0) return best;
    if (double v = f(hi); v < best.value) best = {hi, v};

    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tolerance) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if (fc < best.value) best = {c, fc};
    if (fd < best.value) best = {d, fd};
    return best;
}

/// Uniform scan followed by golden-section refinement around the best sample.
/// For objectives that are not known to be convex.
template <class F>
Minimum scan_then_golden(F&& f, double lo, double hi, double tolerance, std::size_t samples = 65) {
    if (hi < lo) std::swap(lo, hi);
    samples = std::max<std::size_t>(samples, 3);
    const double step = (hi - lo) / static_cast<double>(samples - 1);
    Minimum best;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double x = i + 1 == samples ? hi : lo + step * static_cast<double>(i);
        const double v = f(x);
        if (v < best.value) {
            best = {x, v};
            best_i = i;
        }
    }
    if (step <= tolerance) return best;
    const double a = lo + step * static_cast<double>(best_i > 0 ? best_i - 1 : 0);
    const double b = std::min(hi, lo + step * static_cast<double>(best_i + 1));
    Minimum refined = golden_section(f, a, b, tolerance);
    return refined.value < best.value ? refined : best;
}

}  // namespace cocomp
