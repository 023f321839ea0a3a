#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace splatguard {

/// Pairwise (cascade) summation. The result depends only on the input order,
/// never on thread count, so reductions stay reproducible.
inline double pairwise_sum(std::span<const double> v) {
    constexpr std::size_t kBlock = 32;
    if (v.size() <= kBlock) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/// splitmix64 step; used wherever a small, portable, seedable stream is needed
/// (std:: distributions are not reproducible across standard libraries).
inline constexpr unsigned long long splitmix64(unsigned long long& state) {
    unsigned long long z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Portable seeded generator with uniform helpers.
class Rng {
public:
    explicit constexpr Rng(unsigned long long seed) : state_(seed) {}

    constexpr unsigned long long next() { return splitmix64(state_); }

    /// Uniform in [0,1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n).
    unsigned long long below(unsigned long long n) { return next() % n; }
    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    unsigned long long state_;
};

} // namespace splatguard
