#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "mfg/coupler.hpp"
#include "mfg/particles.hpp"

using namespace mfg;
using mfg::test::domain_1d;
using mfg::test::domain_2d;
using mfg::test::gaussian;

TEST(EulerMaruyama, NoDriftNoNoiseIsIdentity) {
    const DomainSpec d = domain_1d(4.0, 32, 8, 0.5, 0.5);
    ParticleEnsemble e = sample_ensemble(gaussian(d, 1.0), 1000, 3);
    const auto before = e.positions;
    euler_maruyama_step(e, VectorField(d), d.dt(), 0.0);
    EXPECT_EQ(e.positions, before);
}

TEST(EulerMaruyama, ConstantDriftTranslates) {
    const DomainSpec d = domain_2d(4.0, 16, 8, 0.5, 0.5);
    ParticleEnsemble e = sample_ensemble(gaussian(d, 0.3), 1000, 5);
    const auto before = e.positions;
    VectorField u(d);
    for (auto& v : u.component(0)) v = 0.4;
    for (auto& v : u.component(1)) v = -0.2;
    euler_maruyama_step(e, u, 0.1, 0.0);
    for (std::size_t i = 0; i < e.size(); ++i) {
        EXPECT_NEAR(e.positions[2 * i], before[2 * i] + 0.04, 1e-12);
        EXPECT_NEAR(e.positions[2 * i + 1], before[2 * i + 1] - 0.02, 1e-12);
    }
}

TEST(EulerMaruyama, IncrementVariance) {
    const DomainSpec d = domain_1d(20.0, 64, 8, 0.5, 0.5);
    const std::size_t n = 100000;
    ParticleEnsemble e = sample_ensemble(gaussian(d, 0.5), n, 7);
    const auto before = e.positions;
    const double dt = d.dt();
    euler_maruyama_step(e, VectorField(d), dt, 0.5);
    double m = 0.0, s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = e.positions[i] - before[i];
        m += dx;
        s += dx * dx;
    }
    m /= n;
    const double var = s / n - m * m;
    // Sample variance of n normals has standard deviation sigma^2 sqrt(2/n).
    EXPECT_NEAR(var, dt, 3.0 * dt * std::sqrt(2.0 / n));
}

TEST(EulerMaruyama, PositionsStayInFundamentalDomain) {
    const DomainSpec d = domain_1d(2.0, 16, 8, 0.5, 0.5);
    ParticleEnsemble e = sample_ensemble(ScalarField(d, 0.25), 5000, 9);
    VectorField u(d, 3.0);
    for (int k = 0; k < 20; ++k) euler_maruyama_step(e, u, 0.1, 2.0);
    for (double x : e.positions) {
        EXPECT_GE(x, -2.0);
        EXPECT_LT(x, 2.0);
    }
}

TEST(EmpiricalDensity, PointMassIsDelta) {
    const DomainSpec d = domain_1d(4.0, 32, 8, 0.5, 0.5);
    ParticleEnsemble e{d, std::vector<double>(500, d.coordinate(10)), 0, 0};
    const ScalarField f = empirical_density(e, d);
    EXPECT_NEAR(f[10], 1.0 / d.dx(), 1e-12);
    EXPECT_NEAR(f.mass(), 1.0, 1e-14);
    EXPECT_NEAR(f.max(), f[10], 0.0);
}

TEST(EmpiricalDensity, UniformIsFlat) {
    const DomainSpec d = domain_1d(4.0, 32, 8, 0.5, 0.5);
    const std::size_t n = 200000;
    const ScalarField f = empirical_density(sample_ensemble(ScalarField(d, 0.125), n, 11), d);
    EXPECT_NEAR(f.mass(), 1.0, 1e-13);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(f[i], 0.125, 5 * 0.125 * std::sqrt(32.0 / n));
}

TEST(EmpiricalDensity, GaussianWithinSamplingBound) {
    const DomainSpec d = domain_1d(8.0, 128, 8, 0.5, 0.5);
    const std::size_t n = 200000;
    const ScalarField rho0 = gaussian(d, 1.0);
    const ScalarField f = empirical_density(sample_ensemble(rho0, n, 13), d);
    EXPECT_LT(l1_distance(f, rho0), 3.0 * std::sqrt(128.0 / n));
}

TEST(Particles, SeededDeterminism) {
    const DomainSpec d = domain_2d(4.0, 16, 8, 0.5, 0.5);
    const VectorTrajectory u = constant_control(d, {0.3, -0.1});
    auto run = [&](std::uint64_t seed) {
        ParticleEnsemble e = sample_ensemble(gaussian(d, 0.5), 10000, seed);
        for (int k = 0; k < d.time_steps; ++k) euler_maruyama_step(e, u[k], d.dt(), 0.5);
        return e.positions;
    };
    EXPECT_EQ(run(42), run(42));
    EXPECT_NE(run(42), run(43));
}

TEST(Particles, BlocksIndependentOfEnsembleSize) {
    const DomainSpec d = domain_1d(4.0, 32, 8, 0.5, 0.5);
    ParticleEnsemble a = sample_ensemble(gaussian(d, 0.5), kParticleBlock, 17);
    ParticleEnsemble b = sample_ensemble(gaussian(d, 0.5), 3 * kParticleBlock, 17);
    euler_maruyama_step(a, VectorField(d), 0.01, 0.5);
    euler_maruyama_step(b, VectorField(d), 0.01, 0.5);
    for (std::size_t i = 0; i < kParticleBlock; ++i) EXPECT_EQ(a.positions[i], b.positions[i]);
}

TEST(Particles, AgreesWithFokkerPlanck) {
    const DomainSpec d = domain_1d(8.0, 128, 64, 0.5, 0.5);
    const ScalarField rho0 = gaussian(d, 1.0);
    const VectorTrajectory u = constant_control(d, {0.5, 0.0});
    const ParticleRun run = simulate_particles(sample_ensemble(rho0, 200000, 19), u, d.nu);
    const DistanceProfile p = compare_fp(run, solve_fp(rho0, u));
    ASSERT_EQ(p.distance.size(), 65u);
    EXPECT_LT(p.max, 0.05);
    EXPECT_EQ(run.generator, std::string(kParticleGenerator));
    for (const auto& s : run.densities) EXPECT_NEAR(s.mass(), 1.0, 1e-13);
}

TEST(Particles, PureTransportMatchesUpwindLimit) {
    DomainSpec d = domain_1d(8.0, 128, 64, 0.5, 1e-12);
    const ScalarField rho0 = gaussian(d, 1.0);
    const VectorTrajectory u = constant_control(d, {0.5, 0.0});
    const ParticleRun run = simulate_particles(sample_ensemble(rho0, 200000, 23), u, 0.0);
    const DistanceProfile p = compare_fp(run, solve_fp(rho0, u));
    // Sampling error plus the numerical diffusion of first-order upwinding.
    EXPECT_LT(p.distance.back(), p.distance.front() + 10 * d.dx() * 0.5 * d.horizon);
}

TEST(Particles, PlateauShrinksLikeInverseSqrtN) {
    const DomainSpec d = domain_1d(8.0, 64, 32, 0.5, 0.5);
    const ScalarField rho0 = gaussian(d, 1.0);
    const VectorTrajectory u = make_vector_trajectory(d);
    const FpTrajectory fp = solve_fp(rho0, u);
    const double small = compare_fp(simulate_particles(sample_ensemble(rho0, 25000, 29), u, d.nu), fp).plateau;
    const double large = compare_fp(simulate_particles(sample_ensemble(rho0, 100000, 29), u, d.nu), fp).plateau;
    EXPECT_NEAR(large / small, 0.5, 0.15);
}
