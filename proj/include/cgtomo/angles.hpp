#pragma once

#include <cmath>
#include <numbers>

namespace cgtomo {

inline constexpr double kPi = std::numbers::pi;

/// Reduce an angle to [0, pi).
inline double wrap_pi(double a) {
    double w = std::fmod(a, kPi);
    if (w < 0.0) w += kPi;
    if (w >= kPi) w = 0.0;  // fmod rounding at the boundary
    return w;
}

/// Reduce an angle to [0, 2*pi).
inline double wrap_2pi(double a) {
    double w = std::fmod(a, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    if (w >= 2.0 * kPi) w = 0.0;
    return w;
}

/// Reduce an angle difference to (-pi/2, pi/2], the natural range for a
/// pi-periodic axis.
inline double wrap_half_pi(double a) {
    double w = a - kPi * std::floor(a / kPi + 0.5);
    if (w <= -0.5 * kPi) w += kPi;
    return w;
}

}  // namespace cgtomo
