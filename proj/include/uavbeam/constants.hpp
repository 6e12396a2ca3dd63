#pragma once

namespace uavbeam {

// Propagation speed used throughout the delay/Doppler arithmetic. The
// conventional 3e8 m/s keeps round numbers exact (tau = 1 us at 150 m).
inline constexpr double kSpeedOfLight = 3.0e8;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace uavbeam
