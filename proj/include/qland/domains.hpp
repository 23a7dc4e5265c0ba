#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "qland/system.hpp"

namespace qland {

enum class DomainLabel { D1, D2, D3, D4, EXCLUDED };

inline const char* to_string(DomainLabel d) {
    switch (d) {
        case DomainLabel::D1: return "D1";
        case DomainLabel::D2: return "D2";
        case DomainLabel::D3: return "D3";
        case DomainLabel::D4: return "D4";
        case DomainLabel::EXCLUDED: return "EXCLUDED";
    }
    return "?";
}

/// Boundary comparisons use an absolute tolerance so that grid nodes built
/// from rounded multiples of pi land on the intended set.
inline constexpr double domain_boundary_tol = 1e-12;

struct DomainResult {
    DomainLabel label;
    std::string excluded_reason; // empty unless label == EXCLUDED
};

/// Partition of the square phi_W in (0, pi], T in (0, pi/2].
///   D1: T < pi/2, pi/2 <= phi_W < pi - T        (Hessian negative definite)
///   D2: phi_W + T = pi                          (exact reachability boundary)
///   D3: pi - T < phi_W <= pi, excluding (pi, pi/2)
///   D4: 0 < phi_W < pi/2 with phi_W + T != pi/2
inline DomainResult classify_domain(double phi_w, double T) {
    if (!(phi_w > 0.0) || phi_w > pi + domain_boundary_tol)
        throw std::domain_error("classify_domain: phi_W outside (0, pi]");
    if (!(T > 0.0) || T > 0.5 * pi + domain_boundary_tol)
        throw std::domain_error("classify_domain: T outside (0, pi/2]");

    const auto near = [](double x, double y) { return std::abs(x - y) <= domain_boundary_tol; };

    if (near(phi_w + T, pi)) return {DomainLabel::D2, {}};
    if (phi_w + T < pi) {
        if (phi_w >= 0.5 * pi - domain_boundary_tol) {
            if (near(T, 0.5 * pi))
                return {DomainLabel::EXCLUDED, "T = pi/2 with phi_W < pi/2 + boundary"};
            return {DomainLabel::D1, {}};
        }
        if (near(phi_w + T, 0.5 * pi))
            return {DomainLabel::EXCLUDED, "phi_W + T = pi/2 (f0 is a global minimum)"};
        return {DomainLabel::D4, {}};
    }
    // phi_w + T > pi
    if (near(phi_w, pi) && near(T, 0.5 * pi))
        return {DomainLabel::EXCLUDED, "(pi, pi/2) is excluded from D3"};
    return {DomainLabel::D3, {}};
}

/// Hessian-kernel parameter set at the special control.
struct LandscapePoint {
    double phi_w;
    double T;
    double v;

    LandscapePoint(double phi, double time, double coupling = 1.0)
        : phi_w(phi), T(time), v(coupling) {
        if (!(phi_w > 0.0) || phi_w > pi + domain_boundary_tol)
            throw std::domain_error("LandscapePoint: phi_W outside (0, pi]");
        if (!(T > 0.0)) throw std::domain_error("LandscapePoint: T must be positive");
        if (!(v > 0.0)) throw std::domain_error("LandscapePoint: v must be positive");
    }

    /// phi = -(phi_W + T), always recomputed
    double phi() const { return -(phi_w + T); }

    DomainResult domain() const { return classify_domain(phi_w, T); }
};

} // namespace qland
