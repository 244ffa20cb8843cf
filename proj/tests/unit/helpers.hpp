#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "mfg/grid.hpp"

namespace mfg::test {

inline DomainSpec domain_1d(double L, int n, int nt, double T, double nu) {
    DomainSpec d;
    d.dim = 1;
    d.half_width = L;
    d.points = n;
    d.time_steps = nt;
    d.horizon = T;
    d.nu = nu;
    return d;
}

inline DomainSpec domain_2d(double L, int n, int nt, double T, double nu) {
    DomainSpec d = domain_1d(L, n, nt, T, nu);
    d.dim = 2;
    return d;
}

/// Sampled isotropic Gaussian of unit mass (closed form, no renormalization).
inline ScalarField gaussian(const DomainSpec& d, double variance, double cx = 0.0, double cy = 0.0) {
    ScalarField f(d);
    const double norm = std::pow(2.0 * std::numbers::pi * variance, -0.5 * d.dim);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto x = d.position(i);
        double r2 = (x[0] - cx) * (x[0] - cx);
        if (d.dim == 2) r2 += (x[1] - cy) * (x[1] - cy);
        f[i] = norm * std::exp(-r2 / (2.0 * variance));
    }
    return f;
}

inline ScalarField random_field(const DomainSpec& d, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> U(lo, hi);
    ScalarField f(d);
    for (auto& v : f.values()) v = U(rng);
    return f;
}

}  // namespace mfg::test
