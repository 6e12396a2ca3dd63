#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>

#include "uavbeam/array_channel.hpp"
#include "uavbeam/constants.hpp"
#include "uavbeam/scenario.hpp"

namespace uavbeam {

/// One sensing observation per UAV per slot: two-way delay, two-way Doppler,
/// and the compensated echo amplitude (real channel; absent in camera mode).
struct MeasurementVector {
    double tau_hat = 0.0;                 ///< [s]
    double mu_hat = 0.0;                  ///< [Hz]
    std::optional<double> c_tilde{};      ///< normalized echo amplitude
};

/// Constants of the echo-processing noise law. All three measurement
/// variances scale as 1/(G p); the delay and Doppler ones additionally as
/// 1/(Nt Nrb |beta|^2 |a^H f|^2).
struct RadarNoiseModel {
    double a1 = 6.7e-7;
    double a2 = 2.0e4;
    double a3 = 1.0;
    double sigma2 = 1.0;  ///< baseline noise variance sigma^2
    double g = 10.0;      ///< matched-filtering gain
    double xi = 200.0;    ///< radar cross-section scale [m^2]; beta = xi/(tau c)
};

struct RadarNoiseStd {
    double tau = 0.0;        ///< std of the delay noise [s]
    double doppler = 0.0;    ///< std of the Doppler noise [Hz]
    double amplitude = 0.0;  ///< std of the echo-amplitude noise
};

/// Reflection amplitude implied by a two-way delay.
inline double reflection_coefficient(double tau, const RadarNoiseModel& m) {
    return m.xi / (tau * kSpeedOfLight);
}

/// Noise stds of the three measurement channels for a given alignment.
/// Throws when the echo SNR is identically zero (variance overflow), which
/// callers treat as a measurement dropout.
inline RadarNoiseStd radar_noise_std(const RadarNoiseModel& m, double beam_gain2,
                                     double beta_abs2, double p_tx,
                                     const LinkGeometry& geom) {
    if (p_tx <= 0.0 || beam_gain2 <= 0.0 || beta_abs2 <= 0.0)
        throw std::domain_error("radar_noise_std: zero echo SNR, measurement dropout");
    const double nt = geom.tx.size();
    const double nrb = geom.rx.size();
    const double den = m.g * nt * nrb * beta_abs2 * beam_gain2 * p_tx;
    RadarNoiseStd s;
    s.tau = m.a1 * std::sqrt(m.sigma2 / den);
    s.doppler = m.a2 * std::sqrt(m.sigma2 / den);
    s.amplitude = m.a3 * std::sqrt(m.sigma2 / (m.g * p_tx));
    return s;
}

/// Radar measurement with pre-drawn standard normals (one per channel).
/// beam_gain is the complex a^H(phi,theta) f of the transmit side; geom.rx is
/// the BS receive UPA.
inline MeasurementVector radar_measure(const TrueObservables& truth,
                                       std::complex<double> beam_gain, double p_tx,
                                       const RadarNoiseModel& m, const LinkGeometry& geom,
                                       const Eigen::Vector3d& z) {
    const double beta = reflection_coefficient(truth.tau, m);
    const double gain2 = std::norm(beam_gain);
    const RadarNoiseStd s = radar_noise_std(m, gain2, beta * beta, p_tx, geom);
    const double kappa = std::sqrt(static_cast<double>(geom.tx.size()) * geom.rx.size());
    MeasurementVector y;
    y.tau_hat = truth.tau + s.tau * z(0);
    y.mu_hat = truth.mu + s.doppler * z(1);
    y.c_tilde = kappa * beta * beam_gain.real() + s.amplitude * z(2);
    return y;
}

inline MeasurementVector radar_measure(const TrueObservables& truth,
                                       std::complex<double> beam_gain, double p_tx,
                                       const RadarNoiseModel& m, const LinkGeometry& geom,
                                       std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    return radar_measure(truth, beam_gain, p_tx, m, geom, Eigen::Vector3d{n(rng), n(rng), n(rng)});
}

/// Binocular depth from image-plane coordinates: d = B f_l / (xL - xR).
inline double binocular_depth(double x_left, double x_right, double baseline, double focal) {
    const double disparity = x_left - x_right;
    if (disparity <= 0.0) throw std::invalid_argument("binocular_depth: non-positive disparity");
    return baseline * focal / disparity;
}

/// Gaussian error model of the camera pipeline, fitted per quantity.
struct VisionErrorModel {
    double dist_mean = 0.0;   ///< [m]
    double dist_std = 0.5;    ///< [m]
    double vel_mean = 0.0;    ///< [m/s]
    double vel_std = 0.3;     ///< [m/s]
    double angle_std = 0.0087;  ///< bearing error [rad], used by vision-guided IA
    double baseline_m = 0.5;  ///< optical center distance B
    double focal_m = 0.01;    ///< focal length f_l
};

struct VisionMeasurement {
    double d_hat = 0.0;  ///< distance [m]
    double v_hat = 0.0;  ///< radial velocity [m/s], positive = receding
};

inline VisionMeasurement vision_measure(const TrueObservables& truth, double radial_speed,
                                        const VisionErrorModel& m, const Eigen::Vector2d& z) {
    VisionMeasurement v;
    v.d_hat = truth.d + m.dist_mean + m.dist_std * z(0);
    v.v_hat = radial_speed + m.vel_mean + m.vel_std * z(1);
    return v;
}

inline VisionMeasurement vision_measure(const TrueObservables& truth, double radial_speed,
                                        const VisionErrorModel& m, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    return vision_measure(truth, radial_speed, m, Eigen::Vector2d{n(rng), n(rng)});
}

/// Camera measurement mapped into the radar measurement domain; the
/// amplitude channel is absent (2-observation update downstream).
inline MeasurementVector vision_to_measurement(const VisionMeasurement& v, double f_c) {
    MeasurementVector y;
    y.tau_hat = 2.0 * v.d_hat / kSpeedOfLight;
    y.mu_hat = 2.0 * v.v_hat * f_c / kSpeedOfLight;
    y.c_tilde.reset();
    return y;
}

enum class SensingSource { radar, vision };

/// Alternating CM/IM windows under discontinuous reception. im_slots = 0
/// means the ISAC link is always on.
struct DrxSchedule {
    int cm_slots = 1;
    int im_slots = 0;
};

inline SensingSource sensing_source(int slot_index, const DrxSchedule& drx) {
    if (drx.cm_slots < 1 || drx.im_slots < 0)
        throw std::invalid_argument("sensing_source: schedule needs cm_slots >= 1, im_slots >= 0");
    if (drx.im_slots == 0) return SensingSource::radar;
    const int period = drx.cm_slots + drx.im_slots;
    const int phase = ((slot_index % period) + period) % period;
    return phase < drx.cm_slots ? SensingSource::radar : SensingSource::vision;
}

}  // namespace uavbeam
