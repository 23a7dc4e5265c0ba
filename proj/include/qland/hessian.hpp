#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "qland/domains.hpp"
#include "qland/quadrature.hpp"
#include "qland/rootfind.hpp"

namespace qland {

// ---------------------------------------------------------------------------
// Kernels

/// Hessian kernel of the objective at the special control f0 = 0:
///   Hess(s, t) = -2 v^2 cos(phi) cos(2|t - s| + phi),  phi = -(phi_W + T)
inline double hessian_kernel(double s, double t, const LandscapePoint& p) {
    if (s < -1e-15 || s > p.T + 1e-15 || t < -1e-15 || t > p.T + 1e-15)
        throw std::domain_error("hessian_kernel: arguments outside [0, T]");
    const double phi = p.phi();
    return -2.0 * p.v * p.v * std::cos(phi) * std::cos(2.0 * std::abs(t - s) + phi);
}

/// Reduced kernel K = Hess / (v^2 sin 2 phi):
///   K(s, t) = -cos(2|t - s| + phi) / sin(phi)
inline double reduced_kernel(double s, double t, const LandscapePoint& p) {
    if (s < -1e-15 || s > p.T + 1e-15 || t < -1e-15 || t > p.T + 1e-15)
        throw std::domain_error("reduced_kernel: arguments outside [0, T]");
    const double phi = p.phi();
    if (std::abs(std::sin(2.0 * phi)) < 1e-14)
        throw std::domain_error("reduced_kernel: sin(2 phi) = 0, point on excluded diagonal");
    return -std::cos(2.0 * std::abs(t - s) + phi) / std::sin(phi);
}

// ---------------------------------------------------------------------------
// Characteristic functions of the reduced operator

/// Oscillatory-branch characteristic function (roots <-> eigenvalues 4/(4 - a^2))
inline double F1(double a, double phi_w, double T) {
    const double s = std::sin(a * T), c = std::cos(a * T);
    const double s2w = std::sin(2.0 * phi_w), c2w = std::cos(2.0 * phi_w);
    return -4.0 * a - a * a * s * s2w - 4.0 * s * s2w + 4.0 * a * c * c2w;
}

/// Hyperbolic-branch characteristic function (positive roots <-> eigenvalues
/// 4/(4 + a^2)). For a T beyond the exp range, returns a signed infinity with
/// the sign of the dominant term.
inline double F2(double a, double phi_w, double T) {
    if (a < 0.0) throw std::domain_error("F2: a must be nonnegative");
    const double s2w = std::sin(2.0 * phi_w), c2w = std::cos(2.0 * phi_w);
    if (a * T > 700.0) {
        double lead = -s2w; // ~ -a^2 sinh(aT) sin(2 phi_W)
        if (lead == 0.0) lead = -c2w;
        return std::copysign(std::numeric_limits<double>::infinity(), lead);
    }
    const double sh = std::sinh(a * T), ch = std::cosh(a * T);
    return 8.0 * a - 2.0 * a * a * sh * s2w - 8.0 * a * ch * c2w + 8.0 * sh * s2w;
}

/// Determinant of the linear-branch system; zero iff mu = 1 is an eigenvalue.
inline double mu1_determinant(double phi_w, double T) {
    return -2.0 * std::sin(phi_w) * (std::sin(phi_w) + T * std::cos(phi_w));
}

// 2x2 coefficient matrices of the three boundary-condition systems.
// Row-major entries; determinants reproduce F1, Delta, F2.
using CoeffMatrix = std::array<double, 4>;

inline CoeffMatrix oscillatory_system(double a, double phi_w, double T) {
    const double phi = -(phi_w + T);
    const double p2 = phi + 2.0 * T;
    const double s = std::sin(a * T), c = std::cos(a * T);
    return {2.0 * std::sin(phi) - a * s * std::cos(p2) + 2.0 * c * std::sin(p2),
            a * c * std::cos(p2) + 2.0 * s * std::sin(p2) - a * std::cos(phi),
            a * s * std::sin(p2) + 2.0 * c * std::cos(p2) - 2.0 * std::cos(phi),
            -a * std::sin(phi) + 2.0 * s * std::cos(p2) - a * c * std::sin(p2)};
}

inline CoeffMatrix linear_system(double phi_w, double T) {
    const double phi = -(phi_w + T);
    const double p2 = phi + 2.0 * T;
    return {0.5 * (-std::cos(phi) + std::cos(p2) + 2.0 * T * std::sin(p2)),
            std::sin(p2) + std::sin(phi),
            0.5 * (std::sin(phi) + std::sin(p2) - 2.0 * T * std::cos(p2)),
            -std::cos(p2) + std::cos(phi)};
}

inline CoeffMatrix hyperbolic_system(double a, double phi_w, double T) {
    const double phi = -(phi_w + T);
    const double p2 = phi + 2.0 * T;
    const double ep = std::exp(a * T), em = std::exp(-a * T);
    return {a * std::cos(phi) - 2.0 * std::sin(phi) - ep * (a * std::cos(p2) + 2.0 * std::sin(p2)),
            -a * std::cos(phi) - 2.0 * std::sin(phi) + em * (a * std::cos(p2) - 2.0 * std::sin(p2)),
            a * std::sin(phi) + 2.0 * std::cos(phi) + ep * (a * std::sin(p2) - 2.0 * std::cos(p2)),
            -a * std::sin(phi) + 2.0 * std::cos(phi) - em * (2.0 * std::cos(p2) + a * std::sin(p2))};
}

// ---------------------------------------------------------------------------
// Root bracketing

namespace detail {

/// collect sign-change brackets of f on (lo, hi) with the given scan step
template <class F>
std::vector<Bracket> scan_brackets(F&& f, double lo, double hi, double step, std::size_t max_count) {
    std::vector<Bracket> out;
    double x0 = lo, f0 = f(x0);
    for (double x = lo + step; x <= hi + 0.5 * step && out.size() < max_count; x += step) {
        const double x1 = std::min(x, hi);
        const double f1 = f(x1);
        if (f0 == 0.0) out.push_back({x0, x0});
        else if ((f0 > 0.0) != (f1 > 0.0)) out.push_back({x0, x1});
        x0 = x1;
        f0 = f1;
    }
    return out;
}

} // namespace detail

/// Brackets of F1 roots in (2, (pi/2 + 2 pi n_max)/T). For phi_W = pi/2 and
/// phi_W = pi the roots touch zero without a sign change, so the closed-form
/// lattices are returned as degenerate brackets.
inline std::vector<Bracket> bracket_F1_roots(double phi_w, double T, int n_max) {
    if (n_max < 1) throw std::invalid_argument("bracket_F1_roots: n_max must be >= 1");
    std::vector<Bracket> out;
    const auto near = [](double x, double y) { return std::abs(x - y) <= domain_boundary_tol; };
    if (near(phi_w, 0.5 * pi)) {
        for (int n = 0; static_cast<int>(out.size()) < n_max; ++n) {
            const double a = (pi + 2.0 * pi * n) / T;
            if (a > 2.0) out.push_back({a, a});
        }
        return out;
    }
    if (near(phi_w, pi)) {
        for (int n = 1; static_cast<int>(out.size()) < n_max; ++n) {
            const double a = 2.0 * pi * n / T;
            if (a > 2.0) out.push_back({a, a});
        }
        return out;
    }
    const double hi = (0.5 * pi + 2.0 * pi * n_max) / T;
    const double step = std::min(T / 100.0, 0.5 * pi / T / 64.0);
    auto f = [&](double a) { return F1(a, phi_w, T); };
    return detail::scan_brackets(f, 2.0 + 1e-12, hi, step, static_cast<std::size_t>(n_max));
}

/// Sign-change brackets of F1 inside (0, 2); nonempty for D3 points with
/// phi_W < pi (Lemma-2 regime), empty on D1.
inline std::vector<Bracket> bracket_F1_roots_below2(double phi_w, double T) {
    auto f = [&](double a) { return F1(a, phi_w, T); };
    return detail::scan_brackets(f, 1e-9, 2.0 - 1e-12, 2.0 / 4000.0, 16);
}

/// Sign-change brackets of F2 on (0, a_max)
inline std::vector<Bracket> bracket_F2_roots(double phi_w, double T, double a_max) {
    auto f = [&](double a) { return F2(a, phi_w, T); };
    return detail::scan_brackets(f, 1e-9, a_max, std::min(0.01, a_max / 2000.0), 16);
}

// ---------------------------------------------------------------------------
// Eigenpairs

enum class Branch { OSCILLATORY, LINEAR, HYPERBOLIC };

inline const char* to_string(Branch b) {
    switch (b) {
        case Branch::OSCILLATORY: return "oscillatory";
        case Branch::LINEAR: return "linear";
        case Branch::HYPERBOLIC: return "hyperbolic";
    }
    return "?";
}

struct Eigenpair {
    double mu;        // eigenvalue of the reduced operator K
    double a;         // spectral parameter (0 on the linear branch)
    Branch branch;
    double b, c;      // unit-normalized boundary-system null vector

    /// eigenfunction of K, up to normalization
    double eval(double t) const {
        switch (branch) {
            case Branch::OSCILLATORY:
                return (4.0 - a * a) / 4.0 * (b * std::cos(a * t) + c * std::sin(a * t));
            case Branch::HYPERBOLIC:
                return (4.0 + a * a) / 4.0 * (b * std::exp(a * t) + c * std::exp(-a * t));
            case Branch::LINEAR:
                return c * t + b;
        }
        return 0.0;
    }
};

/// Null direction of a (near-singular) 2x2 matrix as the right singular vector
/// of the smallest singular value.
inline std::array<double, 2> smallest_singular_direction(const CoeffMatrix& m) {
    // eigen-decomposition of M^T M (symmetric 2x2)
    const double g11 = m[0] * m[0] + m[2] * m[2];
    const double g12 = m[0] * m[1] + m[2] * m[3];
    const double g22 = m[1] * m[1] + m[3] * m[3];
    const double tr = g11 + g22;
    const double disc = std::sqrt(std::max(0.0, (g11 - g22) * (g11 - g22) + 4.0 * g12 * g12));
    const double lam_min = 0.5 * (tr - disc);
    // (G - lam_min I) x = 0; pick the better-conditioned row
    double x, y;
    if (std::abs(g11 - lam_min) + std::abs(g12) >= std::abs(g12) + std::abs(g22 - lam_min)) {
        x = -g12;
        y = g11 - lam_min;
    } else {
        x = g22 - lam_min;
        y = -g12;
    }
    double n = std::hypot(x, y);
    if (n == 0.0) return {1.0, 0.0}; // zero matrix: any direction
    return {x / n, y / n};
}

inline double singular_ratio(const CoeffMatrix& m) {
    const double g11 = m[0] * m[0] + m[2] * m[2];
    const double g12 = m[0] * m[1] + m[2] * m[3];
    const double g22 = m[1] * m[1] + m[3] * m[3];
    const double tr = g11 + g22;
    const double disc = std::sqrt(std::max(0.0, (g11 - g22) * (g11 - g22) + 4.0 * g12 * g12));
    const double smax = std::sqrt(std::max(0.0, 0.5 * (tr + disc)));
    const double smin = std::sqrt(std::max(0.0, 0.5 * (tr - disc)));
    return smax == 0.0 ? 0.0 : smin / smax;
}

/// Unit-norm null vector of the branch's boundary-condition system at a
/// verified characteristic root.
inline std::array<double, 2> eigenfunction_coeffs(double a, Branch branch, const LandscapePoint& p) {
    CoeffMatrix m;
    switch (branch) {
        case Branch::OSCILLATORY: m = oscillatory_system(a, p.phi_w, p.T); break;
        case Branch::LINEAR: m = linear_system(p.phi_w, p.T); break;
        case Branch::HYPERBOLIC: m = hyperbolic_system(a, p.phi_w, p.T); break;
    }
    // At a degenerate (touching) root the whole system can vanish: the
    // eigenspace is two-dimensional and every direction is a null vector. So
    // sigma_min is compared against the natural entry scale of the system,
    // max(1, |a|), not only against sigma_max.
    const double g11 = m[0] * m[0] + m[2] * m[2];
    const double g12 = m[0] * m[1] + m[2] * m[3];
    const double g22 = m[1] * m[1] + m[3] * m[3];
    const double tr = g11 + g22;
    const double disc = std::sqrt(std::max(0.0, (g11 - g22) * (g11 - g22) + 4.0 * g12 * g12));
    const double smax = std::sqrt(std::max(0.0, 0.5 * (tr + disc)));
    const double smin = std::sqrt(std::max(0.0, 0.5 * (tr - disc)));
    const double scale = std::max({smax, 1.0, std::abs(a)});
    if (smin > 1e-6 * scale)
        throw std::domain_error("eigenfunction_coeffs: system is numerically full-rank, not an eigenvalue");
    if (smax <= 1e-9 * scale) return {1.0, 0.0}; // zero system: any direction is null
    const auto dir = smallest_singular_direction(m);
    if (branch == Branch::LINEAR) return {dir[1], dir[0]}; // system unknowns are (c, b)
    return dir;
}

/// true when the boundary system vanishes entirely (touching root): the
/// eigenvalue is double and every (b, c) direction is an eigenfunction
inline bool eigenspace_is_double(double a, Branch branch, const LandscapePoint& p) {
    CoeffMatrix m;
    switch (branch) {
        case Branch::OSCILLATORY: m = oscillatory_system(a, p.phi_w, p.T); break;
        case Branch::LINEAR: m = linear_system(p.phi_w, p.T); break;
        case Branch::HYPERBOLIC: m = hyperbolic_system(a, p.phi_w, p.T); break;
    }
    double e = 0.0;
    for (double v : m) e = std::max(e, std::abs(v));
    return e <= 1e-9 * std::max(1.0, std::abs(a));
}

// ---------------------------------------------------------------------------
// Quadrature application of K and the Hessian form

/// (K g) sampled on the uniform grid carrying g. The |t-s| kink lies on grid
/// nodes, so each row integral is split at the diagonal.
inline std::vector<double> apply_reduced_operator(const std::vector<double>& g,
                                                  const LandscapePoint& p) {
    const std::size_t n = g.size();
    if (n < 2) throw std::invalid_argument("apply_reduced_operator: need >= 2 samples");
    const double h = p.T / static_cast<double>(n - 1);
    std::vector<double> out(n), row(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ti = static_cast<double>(i) * h;
        for (std::size_t j = 0; j < n; ++j)
            row[j] = reduced_kernel(ti, static_cast<double>(j) * h, p) * g[j];
        out[i] = integrate_samples(std::span<const double>(row), 0, i, h)
               + integrate_samples(std::span<const double>(row), i, n - 1, h);
    }
    return out;
}

/// ||K g - mu g||_2 / ||g||_2 under composite Simpson quadrature
inline double eigen_residual(const std::vector<double>& g, double mu, const LandscapePoint& p) {
    const std::vector<double> kg = apply_reduced_operator(g, p);
    const double h = p.T / static_cast<double>(g.size() - 1);
    std::vector<double> diff(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) diff[i] = kg[i] - mu * g[i];
    const double ng = l2_norm(g, h);
    if (ng == 0.0) throw std::invalid_argument("eigen_residual: zero function");
    return l2_norm(diff, h) / ng;
}

/// (Hess df, df) by nested quadrature of the kernel form
inline double quadratic_form(const std::vector<double>& delta_f, const LandscapePoint& p) {
    const std::size_t n = delta_f.size();
    if (n < 128) throw std::invalid_argument("quadratic_form: need >= 128 samples");
    const double h = p.T / static_cast<double>(n - 1);
    std::vector<double> outer(n), row(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ti = static_cast<double>(i) * h;
        for (std::size_t j = 0; j < n; ++j)
            row[j] = hessian_kernel(ti, static_cast<double>(j) * h, p) * delta_f[j];
        const double inner = integrate_samples(std::span<const double>(row), 0, i, h)
                           + integrate_samples(std::span<const double>(row), i, n - 1, h);
        outer[i] = inner * delta_f[i];
    }
    return integrate_samples(outer, h);
}

// ---------------------------------------------------------------------------
// Spectrum assembly

enum class Verdict { NEGATIVE_DEFINITE, SADDLE, GLOBAL_MAX_BOUNDARY, NOT_APPLICABLE };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::NEGATIVE_DEFINITE: return "NEGATIVE_DEFINITE";
        case Verdict::SADDLE: return "SADDLE";
        case Verdict::GLOBAL_MAX_BOUNDARY: return "GLOBAL_MAX_BOUNDARY";
        case Verdict::NOT_APPLICABLE: return "NOT_APPLICABLE";
    }
    return "?";
}

struct SpectrumReport {
    LandscapePoint point;
    DomainResult domain;
    std::vector<Eigenpair> eigenpairs;          // sorted by |mu| descending
    std::vector<double> hessian_eigenvalues;    // v^2 sin(2 phi) mu, same order
    Verdict verdict = Verdict::NOT_APPLICABLE;
    int n_requested = 0;                        // truncation: negative branch cut here
};

inline constexpr double linear_branch_tol = 1e-10;

/// Enumerate eigenvalues of K on all three branches and classify the point.
/// The negative (oscillatory a > 2) branch is truncated at n_eigs roots; F2 is
/// scanned up to an adaptive bound since it is eventually sign-definite.
inline SpectrumReport spectrum_report(const LandscapePoint& p, int n_eigs = 10) {
    if (n_eigs < 1) throw std::invalid_argument("spectrum_report: n_eigs must be >= 1");
    SpectrumReport rep{p, p.domain(), {}, {}, Verdict::NOT_APPLICABLE, n_eigs};
    const DomainLabel lbl = rep.domain.label;
    if (lbl == DomainLabel::D2 || lbl == DomainLabel::EXCLUDED) return rep;

    auto f1 = [&](double a) { return F1(a, p.phi_w, p.T); };
    std::vector<Eigenpair> pairs;

    // oscillatory branch, mu > 1 part (roots in (0, 2))
    for (const Bracket& br : bracket_F1_roots_below2(p.phi_w, p.T)) {
        const double a = br.degenerate() ? br.lo : refine_root(f1, br);
        // a -> 0 is the linear branch in disguise (F1 always vanishes there)
        if (a > 1e-3) pairs.push_back({4.0 / (4.0 - a * a), a, Branch::OSCILLATORY, 0.0, 0.0});
    }
    // oscillatory branch, negative part (roots in (2, inf)), truncated
    for (const Bracket& br : bracket_F1_roots(p.phi_w, p.T, n_eigs)) {
        const double a = br.degenerate() ? br.lo : refine_root(f1, br);
        pairs.push_back({4.0 / (4.0 - a * a), a, Branch::OSCILLATORY, 0.0, 0.0});
    }
    // linear branch
    if (std::abs(mu1_determinant(p.phi_w, p.T)) <= linear_branch_tol)
        pairs.push_back({1.0, 0.0, Branch::LINEAR, 0.0, 0.0});
    // hyperbolic branch
    const double a_max = std::max(50.0, 20.0 / p.T);
    auto f2 = [&](double a) { return F2(a, p.phi_w, p.T); };
    for (const Bracket& br : bracket_F2_roots(p.phi_w, p.T, a_max)) {
        const double a = br.degenerate() ? br.lo : refine_root(f2, br);
        if (a > 1e-9) pairs.push_back({4.0 / (4.0 + a * a), a, Branch::HYPERBOLIC, 0.0, 0.0});
    }

    std::vector<Eigenpair> resolved;
    resolved.reserve(pairs.size());
    for (Eigenpair& ep : pairs) {
        if (eigenspace_is_double(ep.a, ep.branch, p)) {
            // touching root: report the eigenvalue twice, with the two
            // canonical basis directions of its two-dimensional eigenspace
            Eigenpair twin = ep;
            ep.b = 1.0;
            ep.c = 0.0;
            twin.b = 0.0;
            twin.c = 1.0;
            resolved.push_back(ep);
            resolved.push_back(twin);
        } else {
            const auto bc = eigenfunction_coeffs(ep.a, ep.branch, p);
            ep.b = bc[0];
            ep.c = bc[1];
            resolved.push_back(ep);
        }
    }
    pairs = std::move(resolved);
    std::sort(pairs.begin(), pairs.end(),
              [](const Eigenpair& x, const Eigenpair& y) { return std::abs(x.mu) > std::abs(y.mu); });

    const double scale = p.v * p.v * std::sin(2.0 * p.phi());
    rep.eigenpairs = std::move(pairs);
    rep.hessian_eigenvalues.reserve(rep.eigenpairs.size());
    bool any_pos = false, any_neg = false;
    for (const Eigenpair& ep : rep.eigenpairs) {
        const double lam = scale * ep.mu;
        rep.hessian_eigenvalues.push_back(lam);
        (lam > 0.0 ? any_pos : any_neg) = true;
    }
    if (lbl == DomainLabel::D1 && any_neg && !any_pos)
        rep.verdict = Verdict::NEGATIVE_DEFINITE;
    else if ((lbl == DomainLabel::D3 || lbl == DomainLabel::D4) && any_pos && any_neg)
        rep.verdict = Verdict::SADDLE;
    return rep;
}

// ---------------------------------------------------------------------------
// Lemma sign scans

struct LemmaScanReport {
    double f1_min_margin; // min of -F1 over (0, 2)
    double f2_min_margin; // min of F2 over (0, a_max)
    double a_max;
};

/// Numerical check of the D1 sign lemmas: F1 < 0 on (0, 2) and F2 > 0 on
/// (0, a_max). Throws if either sign is violated.
inline LemmaScanReport sign_scan_lemma_checks(const LandscapePoint& p, double grid_step,
                                              double a_max = 50.0) {
    if (p.domain().label != DomainLabel::D1)
        throw std::domain_error("sign_scan_lemma_checks: point must lie in D1");
    double m1 = std::numeric_limits<double>::infinity();
    for (double a = grid_step; a < 2.0; a += grid_step)
        m1 = std::min(m1, -F1(a, p.phi_w, p.T));
    double m2 = std::numeric_limits<double>::infinity();
    for (double a = grid_step; a <= a_max; a += grid_step)
        m2 = std::min(m2, F2(a, p.phi_w, p.T));
    if (m1 <= 0.0 || m2 <= 0.0)
        throw std::runtime_error("sign_scan_lemma_checks: sign violation, lemma contradiction");
    return {m1, m2, a_max};
}

} // namespace qland
