#pragma once

#include <algorithm>
#include <cmath>

namespace cocomp::tol {

// Time instants closer than this are the same instant.
inline constexpr double kTime = 1e-12;

inline constexpr double kBitsRel = 1e-9;
inline constexpr double kBitsAbs = 1e-6;

/// Comparison slack for two bit counts of the given magnitudes.
inline double bits(double a, double b = 0.0) {
    return std::max(kBitsAbs, kBitsRel * std::max(std::abs(a), std::abs(b)));
}

inline bool bits_le(double a, double b) { return a <= b + bits(a, b); }
inline bool bits_eq(double a, double b) { return std::abs(a - b) <= bits(a, b); }

inline bool time_eq(double a, double b) { return std::abs(a - b) <= kTime; }

}  // namespace cocomp::tol
