#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "uavbeam/constants.hpp"
#include "uavbeam/geometry.hpp"

namespace uavbeam {

using Vector9d = Eigen::Matrix<double, 9, 1>;
using Matrix9d = Eigen::Matrix<double, 9, 9>;

/// Kinematic state of one UAV in BS-centric coordinates (BS at origin).
struct UavState {
    Eigen::Vector3d p = Eigen::Vector3d::Zero();  ///< position [m]
    Eigen::Vector3d v = Eigen::Vector3d::Zero();  ///< velocity [m/s]
    Eigen::Vector3d a = Eigen::Vector3d::Zero();  ///< acceleration [m/s^2]

    Vector9d to_vector() const {
        Vector9d x;
        x << p, v, a;
        return x;
    }
    static UavState from_vector(const Vector9d& x) {
        return {x.segment<3>(0), x.segment<3>(3), x.segment<3>(6)};
    }
};

/// Per-axis standard deviations of the process noise driving the
/// constant-acceleration model.
struct ProcessNoise {
    double sigma_p = 0.02;  ///< [m]
    double sigma_v = 0.2;   ///< [m/s]
    double sigma_a = 0.05;  ///< [m/s^2]
};

struct ScenarioConfig {
    int k = 10;                 ///< UAV count
    double radius = 100.0;      ///< initial hemisphere radius [m]
    double speed_min = 18.0;    ///< [m/s]
    double speed_max = 20.0;    ///< [m/s]
    double heading_azimuth_jitter_deg = 20.0;
    double heading_elevation_jitter_deg = 10.0;
    double slot = 0.02;         ///< slot duration [s]
    int horizon = 400;          ///< total slots
    ProcessNoise process_noise{};
    std::uint64_t seed = 1;
    /// Optional [min, max] altitude band for the initial placement; when
    /// unset, positions are uniform over the full upper hemisphere.
    std::optional<std::pair<double, double>> altitude_band{};
    double altitude_floor = 1.0;  ///< trajectories reflect off this height [m]
};

/// State transition matrix of the constant-acceleration model. The
/// position/acceleration coupling is dt/2, matching the tracked model.
inline Matrix9d transition_matrix(double dt) {
    Matrix9d g = Matrix9d::Identity();
    const Eigen::Matrix3d i3 = Eigen::Matrix3d::Identity();
    g.block<3, 3>(0, 3) = dt * i3;
    g.block<3, 3>(0, 6) = 0.5 * dt * i3;
    g.block<3, 3>(3, 6) = dt * i3;
    return g;
}

/// Initial states: positions on the configured hemisphere, velocities
/// pointing toward the BS horizontally with jittered heading, zero
/// acceleration.
inline std::vector<UavState> generate_initial_states(const ScenarioConfig& cfg,
                                                     std::mt19937_64& rng) {
    if (cfg.k < 1) throw std::invalid_argument("generate_initial_states: K must be >= 1");
    if (cfg.radius <= 0.0) throw std::invalid_argument("generate_initial_states: radius must be > 0");
    if (cfg.speed_min <= 0.0 || cfg.speed_min > cfg.speed_max)
        throw std::invalid_argument("generate_initial_states: invalid speed band");

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<UavState> out;
    out.reserve(static_cast<std::size_t>(cfg.k));

    double z_lo = 0.0, z_hi = cfg.radius;
    if (cfg.altitude_band) {
        z_lo = std::max(0.0, cfg.altitude_band->first);
        z_hi = std::min(cfg.radius, cfg.altitude_band->second);
        if (z_lo >= z_hi) throw std::invalid_argument("generate_initial_states: empty altitude band");
    }

    for (int i = 0; i < cfg.k; ++i) {
        // Uniform area element on the sphere has z uniform; restricting z to a
        // band keeps the draw uniform over the remaining surface strip.
        const double z = z_lo + (z_hi - z_lo) * unif(rng);
        const double az = 2.0 * kPi * unif(rng) - kPi;
        const double rho = std::sqrt(std::max(0.0, cfg.radius * cfg.radius - z * z));
        UavState s;
        s.p = {rho * std::cos(az), rho * std::sin(az), z};

        // Horizontal heading toward the BS, jittered in azimuth and tilted in
        // elevation by the configured bands.
        const double base_az = std::atan2(-s.p.y(), -s.p.x());
        const double jitter_az = deg2rad(cfg.heading_azimuth_jitter_deg) * (2.0 * unif(rng) - 1.0);
        const double tilt = deg2rad(cfg.heading_elevation_jitter_deg) * (2.0 * unif(rng) - 1.0);
        const double speed = cfg.speed_min + (cfg.speed_max - cfg.speed_min) * unif(rng);
        const double h = base_az + jitter_az;
        s.v = speed * Eigen::Vector3d{std::cos(tilt) * std::cos(h),
                                      std::cos(tilt) * std::sin(h),
                                      std::sin(tilt)};
        s.a.setZero();
        out.push_back(s);
    }
    return out;
}

/// One step of the constant-acceleration model with pre-drawn standard
/// normal noise (nine entries scaled by the per-axis sigmas). Trajectories
/// that would cross the altitude floor reflect their vertical motion.
inline UavState evolve_state(const UavState& x, double dt, const ProcessNoise& q,
                             const Vector9d& z, double altitude_floor = 1.0) {
    if (dt <= 0.0) throw std::invalid_argument("evolve_state: dt must be > 0");
    Vector9d u;
    u << q.sigma_p * z.segment<3>(0), q.sigma_v * z.segment<3>(3), q.sigma_a * z.segment<3>(6);
    Vector9d next = transition_matrix(dt) * x.to_vector() + u;
    UavState out = UavState::from_vector(next);
    if (out.p.z() <= altitude_floor) {
        out.p.z() = 2.0 * altitude_floor - out.p.z();
        out.v.z() = -out.v.z();
        out.a.z() = -out.a.z();
    }
    return out;
}

inline UavState evolve_state(const UavState& x, double dt, const ProcessNoise& q,
                             std::mt19937_64& rng, double altitude_floor = 1.0) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vector9d z;
    for (int i = 0; i < 9; ++i) z(i) = n(rng);
    return evolve_state(x, dt, q, z, altitude_floor);
}

/// Noise-free observables of a state: 3-D distance, two-way delay, one- and
/// two-way Doppler at carrier f_c, and the BS-frame angles.
struct TrueObservables {
    double tau = 0.0;    ///< two-way delay [s]
    double mu = 0.0;     ///< two-way Doppler [Hz]
    double gamma = 0.0;  ///< one-way Doppler [Hz]
    double phi = 0.0;    ///< azimuth [rad]
    double theta = 0.0;  ///< elevation [rad]
    double d = 0.0;      ///< distance [m]
};

inline TrueObservables true_observables(const UavState& x, double f_c) {
    const double d = x.p.norm();
    if (d <= 0.0) throw std::invalid_argument("true_observables: zero position");
    TrueObservables o;
    o.d = d;
    o.tau = 2.0 * d / kSpeedOfLight;
    o.gamma = x.v.dot(x.p) * f_c / (kSpeedOfLight * d);
    o.mu = 2.0 * o.gamma;
    const AnglePair ang = angles_of(x.p);
    o.phi = ang.azimuth;
    o.theta = ang.elevation;
    return o;
}

}  // namespace uavbeam
