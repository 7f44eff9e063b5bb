#pragma once

#include <cmath>

namespace osc {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kSqrt2 = 1.41421356237309504880;

inline double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

/// Lower-tail CDF via erfc, accurate deep into both tails.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

/// Upper-tail probability 1 - CDF without cancellation.
inline double normal_sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

/// CDF(b) - CDF(a) for a <= b, stable when both arguments sit in the same tail.
inline double normal_cdf_diff(double a, double b) {
    return 0.5 * (std::erfc(a / kSqrt2) - std::erfc(b / kSqrt2));
}

} // namespace osc
