#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qland/matrix2.hpp"
#include "qland/system.hpp"

namespace qland {

/// sin(x)/x with a Taylor guard near zero
inline double sinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

/// d/dx sinc(x) = (cos x - sinc x) / x, same guard
inline double dsinc(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return -x / 3.0 + x * x2 / 30.0;
    }
    return (std::cos(x) - sinc(x)) / x;
}

/// exp(-i (sigma_z + a V) dt) in closed form.
/// With M = sigma_z + a V one has M^2 = (1 + a^2 v^2) I, so
/// U = cos(alpha) I - i dt M sinc(alpha), alpha = dt sqrt(1 + a^2 v^2).
inline Matrix2 segment_propagator(double a, double dt, const SystemConfig& cfg = {}) {
    if (dt <= 0.0) throw std::invalid_argument("segment_propagator: dt must be positive");
    const double v2 = cfg.v_x * cfg.v_x + cfg.v_y * cfg.v_y;
    const double alpha = dt * std::sqrt(1.0 + a * a * v2);
    const double c = std::cos(alpha);
    const double s = dt * sinc(alpha);
    const complexd mi(0.0, -1.0);
    // M = sigma_z + a V, written out entrywise
    const complexd off(a * cfg.v_x, -a * cfg.v_y);
    return {c + mi * s, mi * s * off, mi * s * std::conj(off), c - mi * s};
}

/// d/da of segment_propagator at fixed dt
inline Matrix2 segment_propagator_derivative(double a, double dt, const SystemConfig& cfg = {}) {
    const double v2 = cfg.v_x * cfg.v_x + cfg.v_y * cfg.v_y;
    const double alpha = dt * std::sqrt(1.0 + a * a * v2);
    const double dalpha = dt * dt * a * v2 / alpha; // alpha >= dt > 0
    const Matrix2 V = cfg.interaction();
    const Matrix2 M = pauli_z() + complexd(a) * V;
    const complexd mi(0.0, -1.0);
    return complexd(-std::sin(alpha) * dalpha) * Matrix2::identity()
         + mi * complexd(dt) * (complexd(sinc(alpha)) * V + complexd(dsinc(alpha) * dalpha) * M);
}

struct PropagationResult {
    Matrix2 total;                 // U_T = U_K ... U_1
    std::vector<Matrix2> steps;    // U_1, ..., U_K
};

/// Total evolution and the per-segment factors (last segment leftmost in the product).
inline PropagationResult propagate(const PiecewiseControl& ctrl, const SystemConfig& cfg = {}) {
    PropagationResult out;
    out.steps.reserve(ctrl.kseg());
    out.total = Matrix2::identity();
    for (double a : ctrl.amplitudes) {
        Matrix2 u = segment_propagator(a, ctrl.dt, cfg);
        out.total = u * out.total;
        out.steps.push_back(u);
    }
    return out;
}

/// Gate fidelity J = |Tr(W^dagger U)|^2 / 4, in [0, 1] for unitary inputs.
inline double objective(const Matrix2& w, const Matrix2& u) {
    const complexd tau = (w.dagger() * u).trace();
    return 0.25 * std::norm(tau);
}

inline double objective(const PhaseGate& gate, const PiecewiseControl& ctrl,
                        const SystemConfig& cfg = {}) {
    return objective(gate.matrix(), propagate(ctrl, cfg).total);
}

/// Objective at the zero control: cos^2(phi_W + T)
inline double objective_at_zero(double phi_w, double T) {
    if (T <= 0.0) throw std::invalid_argument("objective_at_zero: T must be positive");
    const double c = std::cos(phi_w + T);
    return c * c;
}

/// Exact gradient of the finite-dimensional objective J(a_1..a_K).
/// Each component differentiates the closed-form segment exponential and
/// chains it through prefix/suffix products of the remaining factors.
inline std::vector<double> analytic_gradient(const PiecewiseControl& ctrl, const Matrix2& w,
                                             const SystemConfig& cfg = {}) {
    const std::size_t k = ctrl.kseg();
    std::vector<Matrix2> prefix(k + 1), suffix(k + 1);
    prefix[0] = Matrix2::identity();
    std::vector<Matrix2> steps(k);
    for (std::size_t i = 0; i < k; ++i) {
        steps[i] = segment_propagator(ctrl.amplitudes[i], ctrl.dt, cfg);
        prefix[i + 1] = steps[i] * prefix[i];
    }
    suffix[k] = Matrix2::identity();
    for (std::size_t i = k; i-- > 0;) suffix[i] = suffix[i + 1] * steps[i];

    const Matrix2 wd = w.dagger();
    const complexd tau = (wd * prefix[k]).trace();
    std::vector<double> grad(k);
    for (std::size_t i = 0; i < k; ++i) {
        Matrix2 du = segment_propagator_derivative(ctrl.amplitudes[i], ctrl.dt, cfg);
        const complexd dtau = (wd * suffix[i + 1] * du * prefix[i]).trace();
        grad[i] = 0.5 * std::real(std::conj(tau) * dtau);
    }
    return grad;
}

/// Central-difference gradient, the oracle that arbitrates analytic_gradient.
inline std::vector<double> finite_difference_gradient(const PiecewiseControl& ctrl, const Matrix2& w,
                                                      const SystemConfig& cfg, double h) {
    if (h <= 0.0) throw std::invalid_argument("finite_difference_gradient: h must be positive");
    std::vector<double> grad(ctrl.kseg());
    PiecewiseControl probe = ctrl;
    for (std::size_t i = 0; i < ctrl.kseg(); ++i) {
        probe.amplitudes[i] = ctrl.amplitudes[i] + h;
        const double jp = objective(w, propagate(probe, cfg).total);
        probe.amplitudes[i] = ctrl.amplitudes[i] - h;
        const double jm = objective(w, propagate(probe, cfg).total);
        probe.amplitudes[i] = ctrl.amplitudes[i];
        grad[i] = (jp - jm) / (2.0 * h);
    }
    return grad;
}

/// Evolution up to an intermediate time t: full segments, then a partial one.
inline Matrix2 propagate_to(const PiecewiseControl& ctrl, double t, const SystemConfig& cfg = {}) {
    Matrix2 u = Matrix2::identity();
    auto full = static_cast<std::size_t>(std::floor(t / ctrl.dt + 1e-15));
    if (full > ctrl.kseg()) full = ctrl.kseg();
    for (std::size_t i = 0; i < full; ++i)
        u = segment_propagator(ctrl.amplitudes[i], ctrl.dt, cfg) * u;
    const double rest = t - static_cast<double>(full) * ctrl.dt;
    if (rest > 1e-15 && full < ctrl.kseg())
        u = segment_propagator(ctrl.amplitudes[full], rest, cfg) * u;
    return u;
}

/// Frechet-derivative kernel dJ/df(t) = (1/2) Im( conj(Tr Y) Tr(Y V_t) ),
/// Y = W^dagger U_T, V_t = U_t^dagger V U_t.
inline double gradient_kernel(double t, const PiecewiseControl& ctrl, const Matrix2& w,
                              const SystemConfig& cfg = {}) {
    const double T = ctrl.duration();
    if (t < -1e-15 || t > T + 1e-15)
        throw std::domain_error("gradient_kernel: t outside [0, T]");
    const Matrix2 ut = propagate_to(ctrl, t, cfg);
    const Matrix2 y = w.dagger() * propagate(ctrl, cfg).total;
    const Matrix2 vt = ut.dagger() * cfg.interaction() * ut;
    return 0.5 * std::imag(std::conj(y.trace()) * (y * vt).trace());
}

/// Special constant control from the Hamiltonian traces.
/// The denominator follows (Tr V)^2 - 2 Tr(V^2), the only reading under which
/// the traceless interactions of the normalized model give f_0 = 0.
inline double special_control_f0(double tr_h0, double tr_v, double tr_h0v, double tr_v2) {
    const double den = tr_v * tr_v - 2.0 * tr_v2;
    if (std::abs(den) < 1e-14)
        throw std::domain_error("special_control_f0: degenerate system (zero denominator)");
    return (-tr_h0 * tr_v + 2.0 * tr_h0v) / den;
}

inline double special_control_f0(const Matrix2& h0, const Matrix2& v) {
    return special_control_f0(std::real(h0.trace()), std::real(v.trace()),
                              std::real((h0 * v).trace()), std::real((v * v).trace()));
}

/// T_0 = pi / (eigenvalue spread of the traceless part of H_0 + f_0 V).
/// The spread convention is pinned so that H_0 = sigma_z gives T_0 = pi/2.
inline double special_time_T0(const Matrix2& h0, const Matrix2& v, double f0) {
    const Matrix2 h = h0 - complexd(0.5 * std::real(h0.trace())) * Matrix2::identity()
                    + complexd(f0) * (v - complexd(0.5 * std::real(v.trace())) * Matrix2::identity());
    // traceless Hermitian: spread = 2 sqrt(|h01|^2 + h00^2)
    const double spread = 2.0 * std::sqrt(std::norm(h(0, 1)) + std::real(h(0, 0)) * std::real(h(0, 0)));
    if (spread <= 0.0) throw std::domain_error("special_time_T0: zero Hamiltonian");
    return pi / spread;
}

inline double special_time_T0(const SystemConfig& cfg) {
    const Matrix2 v = cfg.interaction();
    return special_time_T0(pauli_z(), v, special_control_f0(pauli_z(), v));
}

/// Closed-form Tr(W^dagger U) for a two-segment control (real for this family);
/// the objective is the square of this value over 4.
inline double two_segment_trace(double a1, double a2, double dt, double phi_w) {
    if (dt <= 0.0) throw std::invalid_argument("two_segment_trace: dt must be positive");
    const double al1 = dt * std::sqrt(1.0 + a1 * a1);
    const double al2 = dt * std::sqrt(1.0 + a2 * a2);
    const double c1 = std::cos(al1), c2 = std::cos(al2);
    const double s1 = sinc(al1), s2 = sinc(al2);
    return 2.0 * std::cos(phi_w) * (c1 * c2 - dt * dt * (1.0 + a1 * a2) * s1 * s2)
         - 2.0 * dt * std::sin(phi_w) * (s1 * c2 + s2 * c1);
}

} // namespace qland
