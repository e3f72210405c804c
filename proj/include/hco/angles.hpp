#pragma once

#include <cmath>
#include <numbers>

namespace hco {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Canonical reduction to [0, 2*pi). Every module uses this one function so
/// that angle comparisons share a single convention.
inline double reduce_angle(double x) {
    double r = std::fmod(x, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    return r;
}

/// Wrap to the signed interval (-pi, pi].
inline double wrap_signed(double x) {
    double r = std::fmod(x, two_pi);
    if (r > pi) r -= two_pi;
    else if (r <= -pi) r += two_pi;
    return r;
}

/// Circular distance between two angles, in [0, pi].
inline double circ_dist(double a, double b) {
    return std::abs(wrap_signed(a - b));
}

/// Euclidean distance on the 2-torus.
inline double torus_dist(double a1, double a2, double b1, double b2) {
    return std::hypot(wrap_signed(a1 - b1), wrap_signed(a2 - b2));
}

} // namespace hco
