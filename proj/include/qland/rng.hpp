#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace qland {

/// Counter-based deterministic random stream (SplitMix64).
///
/// The n-th output is fin(seed + (n + 1) * 0x9e3779b97f4a7c15) where fin is
/// the SplitMix64 finalizer, so streams are reproducible from (seed, counter)
/// alone and portable across implementations.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0)
        : seed_(seed), counter_(counter) {}

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + (++counter_) * 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// uniform in [0, 1) with 53 random bits
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// integer in [0, n)
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    /// standard normal via Box-Muller (consumes two uniforms per call)
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

} // namespace qland
