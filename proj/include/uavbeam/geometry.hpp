#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "uavbeam/constants.hpp"

namespace uavbeam {

/// Azimuth/elevation pair in radians. Azimuth in (-pi, pi], elevation in
/// [-pi/2, pi/2]; airborne targets seen from the array plane have
/// elevation in (0, pi/2).
struct AnglePair {
    double azimuth = 0.0;
    double elevation = 0.0;
};

/// Wrap an angle difference to (-pi, pi].
inline double wrap_pi(double a) {
    a = std::fmod(a + kPi, 2.0 * kPi);
    if (a <= 0.0) a += 2.0 * kPi;
    return a - kPi;
}

/// Azimuth/elevation of a position vector seen from the origin.
/// Throws on the degenerate origin and on the vertical axis, where
/// azimuth is undefined.
inline AnglePair angles_of(const Eigen::Vector3d& p) {
    const double d = p.norm();
    if (d <= 0.0) throw std::invalid_argument("angles_of: zero position");
    if (p.x() == 0.0 && p.y() == 0.0)
        throw std::invalid_argument("angles_of: position on the vertical axis, azimuth undefined");
    return {std::atan2(p.y(), p.x()), std::asin(p.z() / d)};
}

/// Unit direction vector for an angle pair (inverse of angles_of up to range).
inline Eigen::Vector3d unit_from_angles(const AnglePair& a) {
    const double ct = std::cos(a.elevation);
    return {ct * std::cos(a.azimuth), ct * std::sin(a.azimuth), std::sin(a.elevation)};
}

}  // namespace uavbeam
