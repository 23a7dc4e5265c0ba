#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qland/matrix2.hpp"

namespace qland {

inline constexpr double pi = std::numbers::pi;

/// Qubit model H = sigma_z + f(t) V with V = v_x sigma_x + v_y sigma_y.
/// The couplings must not both vanish, otherwise V commutes with H0.
struct SystemConfig {
    double v_x = 1.0;
    double v_y = 0.0;

    SystemConfig() = default;
    SystemConfig(double vx, double vy) : v_x(vx), v_y(vy) {
        if (v_x * v_x + v_y * v_y <= 0.0)
            throw std::invalid_argument("SystemConfig: v_x^2 + v_y^2 must be positive");
    }
    static SystemConfig from_polar(double v, double theta) {
        return {v * std::cos(theta), v * std::sin(theta)};
    }

    double v() const { return std::hypot(v_x, v_y); }
    double theta() const { return std::atan2(v_y, v_x); }

    Matrix2 interaction() const {
        return complexd(v_x) * pauli_x() + complexd(v_y) * pauli_y();
    }
};

/// Piecewise-constant control: amplitude a_k on [ (k-1) dt, k dt ), k = 1..Kseg.
struct PiecewiseControl {
    std::vector<double> amplitudes;
    double dt = 0.0;

    PiecewiseControl() = default;
    PiecewiseControl(std::vector<double> amps, double step) : amplitudes(std::move(amps)), dt(step) {
        if (amplitudes.empty()) throw std::invalid_argument("PiecewiseControl: need at least one segment");
        if (dt <= 0.0) throw std::invalid_argument("PiecewiseControl: dt must be positive");
    }
    static PiecewiseControl zeros(std::size_t kseg, double step) {
        return {std::vector<double>(kseg, 0.0), step};
    }

    std::size_t kseg() const { return amplitudes.size(); }
    double duration() const { return static_cast<double>(amplitudes.size()) * dt; }

    /// amplitude in effect at time t in [0, T]; t = T maps to the last segment
    double value_at(double t) const {
        auto k = static_cast<std::size_t>(t / dt);
        if (k >= amplitudes.size()) k = amplitudes.size() - 1;
        return amplitudes[k];
    }
};

/// Target gate W = diag(e^{i phi_W}, e^{-i phi_W}), phi_W in (0, pi].
struct PhaseGate {
    double phi_w;

    explicit PhaseGate(double phi) : phi_w(phi) {
        if (!(phi > 0.0) || !(phi <= pi))
            throw std::domain_error("PhaseGate: phi_W must lie in (0, pi]");
    }

    Matrix2 matrix() const {
        return {std::polar(1.0, phi_w), 0.0, 0.0, std::polar(1.0, -phi_w)};
    }
};

inline Matrix2 make_phase_gate(double phi_w) { return PhaseGate(phi_w).matrix(); }

} // namespace qland
