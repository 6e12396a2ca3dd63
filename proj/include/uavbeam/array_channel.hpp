#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "uavbeam/constants.hpp"
#include "uavbeam/geometry.hpp"

namespace uavbeam {

/// Half-wavelength uniform planar array, nx by ny elements.
struct UpaGeometry {
    int nx = 1;
    int ny = 1;
    int size() const { return nx * ny; }
};

using SteeringVector = Eigen::VectorXcd;

/// UPA steering vector, unit norm. Entry (ny-1)*Nx + nx carries the phase
/// pi*sin(theta)*[(nx-1)cos(phi) + (ny-1)sin(phi)].
inline SteeringVector steering_vector(double phi, double theta, const UpaGeometry& geom) {
    const int n = geom.size();
    SteeringVector a(n);
    const double st = std::sin(theta);
    const double cp = std::cos(phi), sp = std::sin(phi);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int iy = 0; iy < geom.ny; ++iy) {
        for (int ix = 0; ix < geom.nx; ++ix) {
            const double phase = kPi * st * (ix * cp + iy * sp);
            a(iy * geom.nx + ix) = std::polar(scale, phase);
        }
    }
    return a;
}

/// Inner product a^H(at) a(beam) without materializing the vectors.
inline std::complex<double> beam_gain(const AnglePair& at, const AnglePair& beam,
                                      const UpaGeometry& geom) {
    const double st = std::sin(at.elevation), stb = std::sin(beam.elevation);
    const double cp = std::cos(at.azimuth), sp = std::sin(at.azimuth);
    const double cpb = std::cos(beam.azimuth), spb = std::sin(beam.azimuth);
    std::complex<double> acc(0.0, 0.0);
    for (int iy = 0; iy < geom.ny; ++iy) {
        for (int ix = 0; ix < geom.nx; ++ix) {
            const double phase = kPi * (stb * (ix * cpb + iy * spb) - st * (ix * cp + iy * sp));
            acc += std::polar(1.0, phase);
        }
    }
    return acc / static_cast<double>(geom.size());
}

/// d/d(theta) of beam_gain with respect to the physical angles `at`,
/// beamformer angles held fixed.
inline std::complex<double> beam_gain_dtheta(const AnglePair& at, const AnglePair& beam,
                                             const UpaGeometry& geom) {
    const double st = std::sin(at.elevation), ct = std::cos(at.elevation);
    const double stb = std::sin(beam.elevation);
    const double cp = std::cos(at.azimuth), sp = std::sin(at.azimuth);
    const double cpb = std::cos(beam.azimuth), spb = std::sin(beam.azimuth);
    std::complex<double> acc(0.0, 0.0);
    for (int iy = 0; iy < geom.ny; ++iy) {
        for (int ix = 0; ix < geom.nx; ++ix) {
            const double g = ix * cp + iy * sp;
            const double phase = kPi * (stb * (ix * cpb + iy * spb) - st * g);
            acc += std::complex<double>(0.0, -kPi * ct * g) * std::polar(1.0, phase);
        }
    }
    return acc / static_cast<double>(geom.size());
}

/// d/d(phi) of beam_gain with respect to the physical angles.
inline std::complex<double> beam_gain_dphi(const AnglePair& at, const AnglePair& beam,
                                           const UpaGeometry& geom) {
    const double st = std::sin(at.elevation);
    const double stb = std::sin(beam.elevation);
    const double cp = std::cos(at.azimuth), sp = std::sin(at.azimuth);
    const double cpb = std::cos(beam.azimuth), spb = std::sin(beam.azimuth);
    std::complex<double> acc(0.0, 0.0);
    for (int iy = 0; iy < geom.ny; ++iy) {
        for (int ix = 0; ix < geom.nx; ++ix) {
            const double dg = -ix * sp + iy * cp;
            const double phase = kPi * (stb * (ix * cpb + iy * spb) - st * (ix * cp + iy * sp));
            acc += std::complex<double>(0.0, -kPi * st * dg) * std::polar(1.0, phase);
        }
    }
    return acc / static_cast<double>(geom.size());
}

/// Environment constants of the air-to-ground channel.
struct ChannelParams {
    double a1 = -0.4568;  ///< logistic constants of the LoS probability
    double a2 = 0.0470;
    double a3 = -0.63;
    double a4 = 1.63;
    double kr_min_db = 0.0;   ///< Rician K at zenith
    double kr_max_db = 30.0;  ///< Rician K at the horizon
    double sigma_beta = 1.0;  ///< LoS fading std (rayleigh mode)
    double f_c = 28.0e9;      ///< carrier [Hz]
    int clusters = 3;         ///< NLoS clusters
    int paths_per_cluster = 4;
};

/// LoS probability as a generalized logistic in the elevation (degrees),
/// clamped to [0, 1] -- the fitted constants overshoot slightly at the ends.
inline double los_probability(double theta_deg, const ChannelParams& prm) {
    if (theta_deg < 0.0 || theta_deg > 90.0)
        throw std::invalid_argument("los_probability: elevation outside [0, 90] deg");
    const double p = prm.a3 + prm.a4 / (1.0 + std::exp(-prm.a1 - prm.a2 * (90.0 - theta_deg)));
    return std::clamp(p, 0.0, 1.0);
}

/// Elevation-dependent Rician K-factor (linear), exponential between the
/// configured bounds: K(pi/2) = KR_min, K(0) = KR_max.
inline double rician_factor(double theta_rad, const ChannelParams& prm) {
    if (theta_rad < 0.0 || theta_rad > kPi / 2.0)
        throw std::invalid_argument("rician_factor: elevation outside [0, pi/2]");
    const double kmin = std::pow(10.0, prm.kr_min_db / 10.0);
    const double kmax = std::pow(10.0, prm.kr_max_db / 10.0);
    const double b2 = (2.0 / kPi) * std::log(kmax / kmin);
    return kmin * std::exp(b2 * (kPi / 2.0 - theta_rad));
}

/// True and beamformed angles of one side of a link.
struct LinkAngles {
    AnglePair tx;  ///< departure at the BS array
    AnglePair rx;  ///< arrival at the UAV array
};

struct LinkGeometry {
    UpaGeometry tx;  ///< BS transmit UPA
    UpaGeometry rx;  ///< UAV receive UPA
};

/// Fading behaviour of the LoS coefficient beta.
struct FadingSpec {
    enum class Mode { fixed, rayleigh };
    Mode mode = Mode::fixed;   ///< fixed: beta = 1 (unit composite gain)
    double sigma_beta = 1.0;   ///< std of the complex Gaussian in rayleigh mode
};

/// Composite scalar channel gain after both beamformers:
///   sqrt(K/(K+1)) * beta * (w^H u)(a^H f) + sqrt(1/(K+1)) * NLoS aggregate.
/// The NLoS aggregate sums clusters*paths complex-Gaussian path terms with
/// steering vectors at uniformly drawn hemisphere angles, total power 1.
inline std::complex<double> channel_gain(const LinkAngles& true_angles,
                                         const LinkAngles& beam_angles,
                                         const LinkGeometry& geom, double rician_k,
                                         const ChannelParams& prm, const FadingSpec& fading,
                                         std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    std::complex<double> beta(1.0, 0.0);
    if (fading.mode == FadingSpec::Mode::rayleigh) {
        const double s = fading.sigma_beta / std::sqrt(2.0);
        beta = {s * n(rng), s * n(rng)};
    }

    const std::complex<double> los = beta *
                                     beam_gain(true_angles.rx, beam_angles.rx, geom.rx) *
                                     beam_gain(true_angles.tx, beam_angles.tx, geom.tx);

    const int np = prm.clusters * prm.paths_per_cluster;
    std::complex<double> nlos(0.0, 0.0);
    if (np > 0 && rician_k != std::numeric_limits<double>::infinity()) {
        const double s = 1.0 / std::sqrt(2.0 * np);
        for (int i = 0; i < np; ++i) {
            const AnglePair tx{2.0 * kPi * unif(rng) - kPi, std::asin(unif(rng))};
            const AnglePair rx{2.0 * kPi * unif(rng) - kPi, std::asin(unif(rng))};
            const std::complex<double> g(s * n(rng), s * n(rng));
            nlos += g * beam_gain(rx, beam_angles.rx, geom.rx) *
                    beam_gain(tx, beam_angles.tx, geom.tx);
        }
    }

    if (std::isinf(rician_k)) return los;
    const double wl = std::sqrt(rician_k / (rician_k + 1.0));
    const double wn = std::sqrt(1.0 / (rician_k + 1.0));
    return wl * los + wn * nlos;
}

/// Linear receive SNR for transmit power p, composite gain chain, array gain
/// kappa = sqrt(Nt*Nru), and noise std sigma_r.
inline double receive_snr(double p_tx, std::complex<double> gain_chain, double kappa,
                          double sigma_r) {
    if (p_tx < 0.0) throw std::invalid_argument("receive_snr: negative power");
    if (sigma_r <= 0.0) throw std::invalid_argument("receive_snr: noise std must be > 0");
    const double amp = std::abs(kappa * gain_chain);
    return p_tx * amp * amp / (sigma_r * sigma_r);
}

/// Average achievable rate over K links, bits/s/Hz.
inline double achievable_rate(std::span<const double> snrs) {
    if (snrs.empty()) throw std::invalid_argument("achievable_rate: empty SNR list");
    double acc = 0.0;
    for (double g : snrs) {
        if (g < 0.0) throw std::invalid_argument("achievable_rate: negative SNR");
        acc += std::log2(1.0 + g);
    }
    return acc / static_cast<double>(snrs.size());
}

}  // namespace uavbeam
