#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "uavbeam/array_channel.hpp"
#include "uavbeam/constants.hpp"
#include "uavbeam/geometry.hpp"
#include "uavbeam/scenario.hpp"
#include "uavbeam/sensing.hpp"

namespace uavbeam {

/// State estimate plus error covariance carried across slots.
struct EkfBelief {
    Vector9d x = Vector9d::Zero();
    Matrix9d m = Matrix9d::Zero();
};

/// Per-slot constants the measurement model is linearized around: the
/// transmit beamformer angles, the array geometry (tx for the inner product,
/// rx for the array gain factor), the reflection amplitude estimate, and the
/// carrier. beta is held fixed within a slot; the filter refreshes it from
/// the measured delay.
struct MeasurementConstants {
    AnglePair beam{};
    LinkGeometry geom{};
    double beta = 1.0;
    double f_c = 28.0e9;
};

enum class JacobianMode {
    exact,          ///< exact gradient of theta(p)
    paper_literal,  ///< single-formula elevation gradient (sign/z-row variant)
};

/// Nonlinear measurement map: [two-way delay, two-way Doppler, Re(eta)] with
/// eta = sqrt(Nt*Nrb) * beta * a^H(phi,theta) a(beam).
inline Eigen::Vector3d measurement_fn(const Vector9d& x, const MeasurementConstants& c) {
    const Eigen::Vector3d p = x.segment<3>(0);
    const Eigen::Vector3d v = x.segment<3>(3);
    const double d = p.norm();
    if (d <= 0.0) throw std::invalid_argument("measurement_fn: zero position");
    const AnglePair ang = angles_of(p);
    const double kappa = std::sqrt(static_cast<double>(c.geom.tx.size()) * c.geom.rx.size());
    Eigen::Vector3d h;
    h(0) = 2.0 * d / kSpeedOfLight;
    h(1) = 2.0 * v.dot(p) * c.f_c / (kSpeedOfLight * d);
    h(2) = kappa * c.beta * beam_gain(ang, c.beam, c.geom.tx).real();
    return h;
}

/// Analytic 3x9 measurement Jacobian. The acceleration block is zero; the
/// amplitude row carries only the elevation gradient unless
/// `azimuth_gradient` adds the azimuth term.
inline Eigen::Matrix<double, 3, 9> jacobian(const Vector9d& x, const MeasurementConstants& c,
                                            JacobianMode mode = JacobianMode::exact,
                                            bool azimuth_gradient = false) {
    const Eigen::Vector3d p = x.segment<3>(0);
    const Eigen::Vector3d v = x.segment<3>(3);
    const double d2 = p.squaredNorm();
    const double d = std::sqrt(d2);
    if (d <= 0.0) throw std::invalid_argument("jacobian: zero position");
    const double horiz2 = d2 - p.z() * p.z();
    if (horiz2 <= 0.0)
        throw std::domain_error("jacobian: position on the vertical axis, elevation gradient singular");
    const double horiz = std::sqrt(horiz2);

    Eigen::Matrix<double, 3, 9> h = Eigen::Matrix<double, 3, 9>::Zero();

    // Delay row.
    for (int i = 0; i < 3; ++i) h(0, i) = 2.0 * p(i) / (kSpeedOfLight * d);

    // Doppler row.
    const double pv = p.dot(v);
    for (int i = 0; i < 3; ++i) {
        h(1, i) = 2.0 * c.f_c * (v(i) * d2 - p(i) * pv) / (kSpeedOfLight * d2 * d);
        h(1, i + 3) = c.f_c * h(0, i);
    }

    // Amplitude row: Re(d eta/d theta) * d theta/d p, with the optional
    // azimuth term Re(d eta/d phi) * d phi/d p.
    const AnglePair ang = angles_of(p);
    const double kappa = std::sqrt(static_cast<double>(c.geom.tx.size()) * c.geom.rx.size());
    const double deta_dtheta = kappa * c.beta * beam_gain_dtheta(ang, c.beam, c.geom.tx).real();

    Eigen::Vector3d dtheta_dp;
    if (mode == JacobianMode::exact) {
        dtheta_dp(0) = -p.x() * p.z() / (d2 * horiz);
        dtheta_dp(1) = -p.y() * p.z() / (d2 * horiz);
        dtheta_dp(2) = horiz / d2;
    } else {
        for (int i = 0; i < 3; ++i) dtheta_dp(i) = p(i) * p.z() / (d2 * horiz);
    }
    for (int i = 0; i < 3; ++i) h(2, i) = deta_dtheta * dtheta_dp(i);

    if (azimuth_gradient) {
        const double deta_dphi = kappa * c.beta * beam_gain_dphi(ang, c.beam, c.geom.tx).real();
        h(2, 0) += deta_dphi * (-p.y() / horiz2);
        h(2, 1) += deta_dphi * (p.x() / horiz2);
    }
    return h;
}

/// Time update: x = G x, M = G M G^T + Qs. The covariance is re-symmetrized.
inline EkfBelief predict(const EkfBelief& belief, double dt, const Matrix9d& qs) {
    const Matrix9d g = transition_matrix(dt);
    EkfBelief out;
    out.x = g * belief.x;
    out.m = g * belief.m * g.transpose() + qs;
    out.m = 0.5 * (out.m + out.m.transpose());
    return out;
}

/// Measurement update around an externally evaluated predicted measurement
/// h(x_pred). The amplitude channel is dropped when absent from the
/// measurement (camera mode): the filter degrades to a 2-observation update.
/// qm_diag holds the per-channel noise variances.
inline EkfBelief update(const EkfBelief& predicted, const MeasurementVector& y,
                        const Eigen::Vector3d& qm_diag, const Eigen::Matrix<double, 3, 9>& h_full,
                        const Eigen::Vector3d& predicted_measurement, bool joseph_form = false) {
    const int rows = y.c_tilde.has_value() ? 3 : 2;
    for (int i = 0; i < rows; ++i)
        if (qm_diag(i) <= 0.0)
            throw std::invalid_argument("update: measurement covariance not positive definite");

    Eigen::VectorXd innov(rows);
    innov(0) = y.tau_hat - predicted_measurement(0);
    innov(1) = y.mu_hat - predicted_measurement(1);
    if (rows == 3) innov(2) = *y.c_tilde - predicted_measurement(2);

    const Eigen::MatrixXd h = h_full.topRows(rows);
    const Eigen::MatrixXd qm = qm_diag.head(rows).asDiagonal();
    const Eigen::MatrixXd s = qm + h * predicted.m * h.transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(s);
    if (!lu.isInvertible())
        throw std::runtime_error("update: innovation covariance not invertible");
    const Eigen::MatrixXd k = predicted.m * h.transpose() * lu.inverse();

    EkfBelief out;
    out.x = predicted.x + k * innov;
    if (joseph_form) {
        const Matrix9d ikh = Matrix9d::Identity() - k * h;
        out.m = ikh * predicted.m * ikh.transpose() + k * qm * k.transpose();
    } else {
        out.m = (Matrix9d::Identity() - k * h) * predicted.m;
    }
    out.m = 0.5 * (out.m + out.m.transpose());
    return out;
}

/// Beam pointing derived from the predicted position.
inline AnglePair predicted_beam_angles(const EkfBelief& predicted) {
    const Eigen::Vector3d p = predicted.x.segment<3>(0);
    if (p.norm() <= 0.0) throw std::invalid_argument("predicted_beam_angles: zero position");
    return angles_of(p);
}

/// Diagonal process covariance from the per-axis noise spec.
inline Matrix9d process_covariance(const ProcessNoise& q) {
    Matrix9d qs = Matrix9d::Zero();
    for (int i = 0; i < 3; ++i) {
        qs(i, i) = q.sigma_p * q.sigma_p;
        qs(i + 3, i + 3) = q.sigma_v * q.sigma_v;
        qs(i + 6, i + 6) = q.sigma_a * q.sigma_a;
    }
    return qs;
}

}  // namespace uavbeam
