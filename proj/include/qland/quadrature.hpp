#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace qland {

/// Integral of uniformly sampled values over [first, last] grid indices with
/// spacing h. Composite Simpson; an odd interval count gets a 3/8 tail so the
/// order is preserved.
inline double integrate_samples(std::span<const double> values, std::size_t first, std::size_t last,
                                double h) {
    if (last <= first) return 0.0;
    const std::size_t n = last - first; // interval count
    if (n == 1) return 0.5 * h * (values[first] + values[first + 1]);
    std::size_t simpson_end = last;
    double tail = 0.0;
    if (n % 2 != 0) {
        if (n == 3) {
            return 3.0 * h / 8.0
                 * (values[first] + 3.0 * values[first + 1] + 3.0 * values[first + 2] + values[first + 3]);
        }
        simpson_end = last - 3;
        tail = 3.0 * h / 8.0
             * (values[last - 3] + 3.0 * values[last - 2] + 3.0 * values[last - 1] + values[last]);
    }
    double sum = values[first] + values[simpson_end];
    for (std::size_t i = first + 1; i < simpson_end; ++i)
        sum += ((i - first) % 2 == 1 ? 4.0 : 2.0) * values[i];
    return h / 3.0 * sum + tail;
}

inline double integrate_samples(const std::vector<double>& values, double h) {
    if (values.size() < 2) throw std::invalid_argument("integrate_samples: need >= 2 samples");
    return integrate_samples(std::span<const double>(values), 0, values.size() - 1, h);
}

/// L2 norm of a sampled function over its uniform grid
inline double l2_norm(const std::vector<double>& values, double h) {
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) sq[i] = values[i] * values[i];
    return std::sqrt(integrate_samples(sq, h));
}

} // namespace qland
