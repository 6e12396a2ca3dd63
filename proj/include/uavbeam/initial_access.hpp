#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavbeam/array_channel.hpp"
#include "uavbeam/constants.hpp"
#include "uavbeam/geometry.hpp"
#include "uavbeam/scenario.hpp"
#include "uavbeam/sensing.hpp"

namespace uavbeam {

/// Quantized beam codebook of a UPA with Q phase-control bits: a
/// 2^(Q/2) x 2^(Q/2) grid of (azimuth, elevation) pairs with spacing
/// pi/2^(Q/2) per axis, enumerated elevation-major.
struct Codebook {
    int q_bits = 4;
    std::vector<AnglePair> entries;

    int axis_size() const { return 1 << (q_bits / 2); }
    double spacing() const { return kPi / axis_size(); }
};

inline Codebook build_codebook(int q_bits) {
    if (q_bits < 2 || q_bits % 2 != 0)
        throw std::invalid_argument("build_codebook: Q must be even and >= 2");
    Codebook cb;
    cb.q_bits = q_bits;
    const int n = cb.axis_size();
    cb.entries.reserve(static_cast<std::size_t>(n) * n);
    for (int me = 0; me < n; ++me)       // elevation-major ordering
        for (int ma = 0; ma < n; ++ma)
            cb.entries.push_back({ma * kPi / n, me * kPi / n});
    return cb;
}

/// Ordered subset of codebook indices around the grid point nearest the
/// sensed angles.
struct PotentialBeamSet {
    std::vector<int> indices;
};

/// Index of the grid point nearest the sensed angles, per-axis, clamped to
/// the grid range.
inline int nearest_codebook_index(const Codebook& cb, double sensed_phi, double sensed_theta) {
    const int n = cb.axis_size();
    const double step = cb.spacing();
    const int ia = std::clamp(static_cast<int>(std::lround(sensed_phi / step)), 0, n - 1);
    const int ie = std::clamp(static_cast<int>(std::lround(sensed_theta / step)), 0, n - 1);
    return ie * n + ia;
}

/// Cardinality-S window around the nearest grid point: ceil((S-1)/2)
/// successors and the remainder predecessors in the flat grid ordering,
/// shifted at the edges to preserve the cardinality.
inline PotentialBeamSet potential_set(const Codebook& cb, double sensed_phi, double sensed_theta,
                                      int s) {
    const int total = static_cast<int>(cb.entries.size());
    if (s < 1 || s > total)
        throw std::invalid_argument("potential_set: cardinality outside [1, 2^Q]");
    const int center = nearest_codebook_index(cb, sensed_phi, sensed_theta);
    const int up = (s - 1 + 1) / 2;  // ceil((S-1)/2)
    int lo = center - (s - 1 - up);
    int hi = center + up;
    if (lo < 0) {
        hi -= lo;
        lo = 0;
    }
    if (hi > total - 1) {
        lo -= hi - (total - 1);
        hi = total - 1;
    }
    PotentialBeamSet out;
    out.indices.reserve(static_cast<std::size_t>(s));
    for (int i = lo; i <= hi; ++i) out.indices.push_back(i);
    return out;
}

enum class IaScheme { proposed, exhaustive, iterative, pi_bs, pi_uav };

inline const char* to_string(IaScheme s) {
    switch (s) {
        case IaScheme::proposed: return "proposed";
        case IaScheme::exhaustive: return "exhaustive";
        case IaScheme::iterative: return "iterative";
        case IaScheme::pi_bs: return "pi_bs";
        case IaScheme::pi_uav: return "pi_uav";
    }
    return "?";
}

/// Closed-form IA delay in ms. proposed counts the PSS sweep over the two
/// potential sets plus the RA sweep on the BS side; exhaustive is the
/// worst-case full-codebook figure; the PI schemes keep the single-sided
/// sweep; iterative is modeled as a quarter of exhaustive.
inline double ia_delay(IaScheme scheme, int q_b, int q_u, int s1, int s2, double t_p_ms) {
    if (q_b < 2 || q_u < 2 || s1 < 1 || s2 < 1 || t_p_ms <= 0.0)
        throw std::invalid_argument("ia_delay: parameters must be positive");
    const double nb = std::pow(2.0, q_b);
    const double nu = std::pow(2.0, q_u);
    switch (scheme) {
        case IaScheme::proposed: return s1 * (s2 + 1.0) * t_p_ms;
        case IaScheme::exhaustive: return (nb + 1.0) * nu * t_p_ms;
        case IaScheme::iterative: return (nb + 1.0) * nu * t_p_ms / 4.0;
        case IaScheme::pi_bs: return nb * t_p_ms;
        case IaScheme::pi_uav: return nu * t_p_ms;
    }
    throw std::logic_error("ia_delay: unknown scheme");
}

/// Variant of the proposed-scheme delay that counts only the PSS sweep
/// (S1 * S2 probes), for figure reproduction.
inline double ia_delay_proposed_pss_only(int s1, int s2, double t_p_ms) {
    return s1 * s2 * t_p_ms;
}

struct IaOutcome {
    IaScheme scheme = IaScheme::proposed;
    double delay_ms = 0.0;
    bool success = false;
    int bs_beam = -1;   ///< codebook index selected at the BS
    int uav_beam = -1;  ///< codebook index selected at the UAV
};

struct IaSimParams {
    double p_tx = 1.0;
    double sigma_r = 1.0;
    double t_p_ms = 5.0;
    int s1 = 2;
    int s2 = 2;
    double snr_threshold_db = 10.0;  ///< detection threshold above the noise floor
    LinkGeometry geom{};
    ChannelParams channel{};
    FadingSpec fading{};
    VisionErrorModel vision{};
};

/// One IA attempt: walks the PSS probe sequence of the scheme over a single
/// channel draw, evaluating each beam pair's receive SNR, then the RA sweep
/// on the best pair. Vision-guided schemes centre their potential sets on
/// the camera bearing estimate.
inline IaOutcome simulate_ia(const UavState& uav, IaScheme scheme, const Codebook& bs_cb,
                             const Codebook& uav_cb, const IaSimParams& prm,
                             std::mt19937_64& rng) {
    const TrueObservables truth = true_observables(uav, prm.channel.f_c);

    // DoD at the BS equals the UAV bearing; arrival at the UAV-bottom array
    // is the mirrored direction. In BS-centric coordinates both share the
    // geometry angles.
    const LinkAngles true_angles{{truth.phi, truth.theta}, {truth.phi, truth.theta}};
    const double rician = rician_factor(truth.theta, prm.channel);

    // Camera bearing estimate steering the vision-guided sets.
    std::normal_distribution<double> n01(0.0, 1.0);
    const double sensed_phi = truth.phi + prm.vision.angle_std * n01(rng);
    const double sensed_theta = truth.theta + prm.vision.angle_std * n01(rng);

    // One channel draw shared by every probe of this attempt.
    const std::uint64_t channel_seed = rng();

    std::vector<int> bs_candidates, uav_candidates;
    const auto all_of = [](const Codebook& cb) {
        std::vector<int> v(cb.entries.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i);
        return v;
    };
    switch (scheme) {
        case IaScheme::proposed:
            bs_candidates = potential_set(bs_cb, sensed_phi, sensed_theta, prm.s1).indices;
            uav_candidates = potential_set(uav_cb, sensed_phi, sensed_theta, prm.s2).indices;
            break;
        case IaScheme::exhaustive:
        case IaScheme::iterative:
            bs_candidates = all_of(bs_cb);
            uav_candidates = all_of(uav_cb);
            break;
        case IaScheme::pi_bs:
            bs_candidates = all_of(bs_cb);
            uav_candidates = {nearest_codebook_index(uav_cb, sensed_phi, sensed_theta)};
            break;
        case IaScheme::pi_uav:
            bs_candidates = {nearest_codebook_index(bs_cb, sensed_phi, sensed_theta)};
            uav_candidates = all_of(uav_cb);
            break;
    }

    const double kappa = std::sqrt(static_cast<double>(prm.geom.tx.size()) * prm.geom.rx.size());
    const double threshold = std::pow(10.0, prm.snr_threshold_db / 10.0);

    double best_snr = -1.0;
    int best_bs = -1, best_uav = -1;
    long probes = 0;
    for (const int bi : bs_candidates) {
        for (const int ui : uav_candidates) {
            ++probes;
            std::mt19937_64 ch(channel_seed);  // identical draw for every probe
            const LinkAngles beams{bs_cb.entries[static_cast<std::size_t>(bi)],
                                   uav_cb.entries[static_cast<std::size_t>(ui)]};
            const auto g = channel_gain(true_angles, beams, prm.geom, rician, prm.channel,
                                        prm.fading, ch);
            const double snr = receive_snr(prm.p_tx, g, kappa, prm.sigma_r);
            if (snr > best_snr) {
                best_snr = snr;
                best_bs = bi;
                best_uav = ui;
            }
        }
    }

    // RA stage on top of the PSS sweep, counted so that a successful walk
    // lands exactly on the scheme's analytic delay: the proposed scheme
    // re-sweeps its S1 BS beams, the exhaustive scheme its UAV codebook; the
    // single-sided PI schemes have no second stage.
    if (scheme == IaScheme::proposed) {
        probes += static_cast<long>(bs_candidates.size());
    } else if (scheme == IaScheme::exhaustive || scheme == IaScheme::iterative) {
        probes += static_cast<long>(uav_candidates.size());
    }

    IaOutcome out;
    out.scheme = scheme;
    out.success = best_snr >= threshold;
    out.bs_beam = best_bs;
    out.uav_beam = best_uav;
    double delay = static_cast<double>(probes) * prm.t_p_ms;
    if (scheme == IaScheme::iterative) delay /= 4.0;  // hierarchical probe model
    if (!out.success) delay = ia_delay(scheme, bs_cb.q_bits, uav_cb.q_bits, prm.s1, prm.s2,
                                       prm.t_p_ms);
    out.delay_ms = delay;
    return out;
}

}  // namespace uavbeam
