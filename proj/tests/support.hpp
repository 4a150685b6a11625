#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "willmore/geometry.hpp"

namespace willmore::testing {

// Fixed-seed generator so every property run sees the same cases.
class Gen {
public:
    explicit Gen(std::uint64_t seed = 0x5eed'2026ULL) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    // log-uniform magnitude in [lo, hi] with a random sign
    double signed_log_uniform(double lo, double hi)
    {
        const double m = std::exp(uniform(std::log(lo), std::log(hi)));
        return coin() ? m : -m;
    }

    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

    bool coin() { return std::bernoulli_distribution(0.5)(rng_); }

    geometry::GeometryPoint point()
    {
        geometry::GeometryPoint p;
        p.r = log_uniform(1e-3, 1e2);
        p.w = signed_log_uniform(1e-4, 1e3);
        p.dw = signed_log_uniform(1e-4, 1e3);
        p.ddw = signed_log_uniform(1e-4, 1e3);
        return p;
    }

private:
    std::mt19937_64 rng_;
};

inline double rel_gap(double x, double y)
{
    return std::abs(x - y) / std::max({1.0, std::abs(x), std::abs(y)});
}

}  // namespace willmore::testing
