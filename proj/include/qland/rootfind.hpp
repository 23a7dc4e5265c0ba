#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace qland {

/// Sign-change interval [lo, hi]; lo == hi marks a known (degenerate) root.
struct Bracket {
    double lo;
    double hi;
    bool degenerate() const { return lo == hi; }
};

/// Safeguarded secant/bisection refinement inside a sign-change bracket.
/// The iterate never leaves [lo, hi]; falls back to bisection whenever the
/// secant step stalls or escapes.
template <class F>
double refine_root(F&& f, Bracket bracket, double tol = 1e-12, int max_iter = 200) {
    if (bracket.degenerate()) return bracket.lo;
    double lo = bracket.lo, hi = bracket.hi;
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("refine_root: no sign change on bracket");

    double x = lo, fx = flo;
    for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
        double cand = x - fx * (hi - lo) / (fhi - flo); // secant through the bracket ends
        const double mid = 0.5 * (lo + hi);
        if (!(cand > lo) || !(cand < hi)) cand = mid;
        // keep progress: if the candidate hugs an endpoint, bisect instead
        if (std::min(cand - lo, hi - cand) < 0.01 * (hi - lo)) cand = mid;
        const double fc = f(cand);
        if (fc == 0.0) return cand;
        if ((fc > 0.0) == (flo > 0.0)) {
            lo = cand;
            flo = fc;
        } else {
            hi = cand;
            fhi = fc;
        }
        x = cand;
        fx = fc;
    }
    return 0.5 * (lo + hi);
}

} // namespace qland
