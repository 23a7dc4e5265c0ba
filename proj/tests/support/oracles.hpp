#pragma once

// Test-only oracles: a scaled-and-squared series matrix exponential that is
// independent of the closed-form propagator, and smooth random test functions
// for quadrature/operator checks.

#include <cmath>
#include <vector>

#include "qland/dynamics.hpp"
#include "qland/matrix2.hpp"
#include "qland/rng.hpp"

namespace qland::testing {

/// exp(M) via 16-term Taylor series after scaling M by 2^-k, then squaring k times
inline Matrix2 expm_oracle(const Matrix2& m) {
    int k = 0;
    double norm = 2.0 * m.max_abs();
    while (norm > 0.25) {
        norm *= 0.5;
        ++k;
    }
    const Matrix2 x = complexd(std::ldexp(1.0, -k)) * m;
    Matrix2 term = Matrix2::identity();
    Matrix2 sum = Matrix2::identity();
    for (int n = 1; n <= 16; ++n) {
        term = complexd(1.0 / n) * (term * x);
        sum = sum + term;
    }
    for (int i = 0; i < k; ++i) sum = sum * sum;
    return sum;
}

/// exp(-i (sigma_z + a V) dt) from the series oracle
inline Matrix2 segment_oracle(double a, double dt, const SystemConfig& cfg = {}) {
    const Matrix2 m = pauli_z() + complexd(a) * cfg.interaction();
    return expm_oracle(complexd(0.0, -dt) * m);
}

/// Random smooth test function: a low-order trigonometric polynomial with
/// moderate frequencies; infinitely differentiable on [0, T].
struct SmoothFn {
    std::vector<double> amp_c, amp_s, freq;

    double operator()(double t) const {
        double y = 0.0;
        for (std::size_t m = 0; m < freq.size(); ++m)
            y += amp_c[m] * std::cos(freq[m] * t) + amp_s[m] * std::sin(freq[m] * t);
        return y;
    }
    double second_derivative(double t) const {
        double y = 0.0;
        for (std::size_t m = 0; m < freq.size(); ++m)
            y -= freq[m] * freq[m]
               * (amp_c[m] * std::cos(freq[m] * t) + amp_s[m] * std::sin(freq[m] * t));
        return y;
    }
};

inline SmoothFn make_smooth(CounterRng& rng, std::size_t terms = 4, double max_freq = 6.0) {
    SmoothFn f;
    for (std::size_t m = 0; m < terms; ++m) {
        f.amp_c.push_back(rng.uniform(-1.0, 1.0));
        f.amp_s.push_back(rng.uniform(-1.0, 1.0));
        f.freq.push_back(rng.uniform(0.0, max_freq));
    }
    return f;
}

/// uniform samples of a callable on [0, T]
template <class F>
std::vector<double> sample(const F& f, double T, std::size_t n) {
    std::vector<double> out(n);
    const double h = T / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = f(static_cast<double>(i) * h);
    return out;
}

} // namespace qland::testing
