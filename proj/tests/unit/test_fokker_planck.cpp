#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "mfg/coupler.hpp"
#include "mfg/fokker_planck.hpp"
#include "mfg/spectral.hpp"

using namespace mfg;
using mfg::test::domain_1d;
using mfg::test::domain_2d;
using mfg::test::gaussian;

namespace {

VectorTrajectory random_control(const DomainSpec& d, std::mt19937_64& rng, double a) {
    // Smooth random drift: a few low modes, scaled to sup norm a.
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    VectorTrajectory u = make_vector_trajectory(d);
    const double c1 = U(rng), c2 = U(rng), ph = 3 * U(rng);
    for (int k = 0; k <= d.time_steps; ++k) {
        const double t = k * d.dt();
        for (int ax = 0; ax < d.dim; ++ax) {
            for (std::size_t i = 0; i < d.cells(); ++i) {
                const auto x = d.position(i);
                const double s = std::sin(M_PI * x[ax] / d.half_width + ph + t) * c1 +
                                 std::cos(2 * M_PI * x[1 - ax] / d.half_width) * c2;
                u[k].component(ax)[i] = a * std::clamp(s / 2.0, -1.0, 1.0);
            }
        }
    }
    return u;
}

double center_of_mass(const ScalarField& f) {
    double m = 0.0, s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        m += f[i];
        s += f.domain().position(i)[0] * f[i];
    }
    return s / m;
}

}  // namespace

TEST(StepFp, PureDiffusionOfKernel) {
    const DomainSpec d = domain_1d(10.0, 256, 256, 1.0, 0.5);
    const HeatKernelSpec k{0.5};
    const ScalarField rho = heat_kernel_field(k, 0.5, d);
    const ScalarField next = step_fp(rho, VectorField(d), d.dt(), d.nu);
    const double err = l1_distance(next, heat_kernel_field(k, 0.5 + d.dt(), d));
    EXPECT_LT(err, 5.0 * d.dt() * d.dt() / 0.25);
}

TEST(SolveFp, GaussianHeatOracle) {
    const DomainSpec d = domain_1d(10.0, 256, 256, 1.0, 0.5);
    const FpTrajectory t = solve_fp(gaussian(d, 1.0), make_vector_trajectory(d));
    ASSERT_EQ(t.slices.size(), 257u);
    EXPECT_LT(l1_distance(t.slices.back(), gaussian(d, 1.0 + 2 * 0.5 * 1.0)), 1e-3);
}

TEST(SolveFp, ConstantDriftTranslates) {
    const DomainSpec d = domain_1d(10.0, 256, 128, 1.0, 0.5);
    const FpTrajectory t = solve_fp(gaussian(d, 1.0), constant_control(d, {0.6, 0.0}));
    EXPECT_LT(std::abs(center_of_mass(t.slices.back()) - 0.6), d.dx());
}

TEST(SolveFp, MassPositivityAndProbabilityClass) {
    std::mt19937_64 rng(31);
    for (const DomainSpec& d : {domain_1d(6.0, 64, 32, 0.5, 0.5), domain_2d(6.0, 32, 16, 0.3, 0.5)}) {
        for (int trial = 0; trial < 5; ++trial) {
            const ScalarField rho0 = gaussian(d, 0.5 + trial * 0.2);
            const FpTrajectory t = solve_fp(rho0, random_control(d, rng, 2.0));
            for (const auto& s : t.slices) {
                EXPECT_NEAR(s.mass(), rho0.mass(), 1e-12 * rho0.mass());
                EXPECT_GE(s.min(), 0.0);
            }
        }
    }
}

TEST(SolveFpMild, ZeroControlIsHeatFlow) {
    const DomainSpec d = domain_1d(8.0, 128, 32, 0.5, 0.5);
    const ScalarField rho0 = gaussian(d, 0.8);
    const FpTrajectory t = solve_fp_mild(rho0, make_vector_trajectory(d));
    EXPECT_LE(t.diagnostics.picard_iterations, t.diagnostics.slabs);
    for (int k = 1; k <= d.time_steps; ++k)
        EXPECT_LT(l1_distance(t.slices[k], heat_convolve(rho0, {0.5}, k * d.dt())), 1e-12);
}

TEST(SolveFpMild, AgreesWithFiniteDifferences) {
    std::mt19937_64 rng(37);
    const DomainSpec d = domain_1d(8.0, 128, 64, 0.5, 0.5);
    const VectorTrajectory u = random_control(d, rng, 1.0);
    const ScalarField rho0 = gaussian(d, 1.0);
    const double dist = l1_distance(solve_fp(rho0, u).slices.back(), solve_fp_mild(rho0, u).slices.back());
    EXPECT_LT(dist, 1e-2);
    EXPECT_LT(dist, 10 * (d.dx() + d.dt()));
}

TEST(SolveFp, SpatialConvergenceOrder) {
    // Pure diffusion with a fine time step: error should drop by about 4 under dx halving.
    auto error = [](int n) {
        const DomainSpec d = domain_1d(10.0, n, 2048, 0.5, 0.5);
        const FpTrajectory t = solve_fp(gaussian(d, 0.5), make_vector_trajectory(d));
        return l1_distance(t.slices.back(), gaussian(d, 0.5 + 0.5));
    };
    const double e1 = error(32), e2 = error(64);
    EXPECT_GE(e1 / e2, 1.8) << e1 << " " << e2;
}

TEST(Contraction, IdenticalInputsStayEqual) {
    const DomainSpec d = domain_1d(6.0, 64, 32, 0.5, 0.5);
    const ContractionReport r =
        l1_contraction_check(gaussian(d, 1.0), gaussian(d, 1.0), constant_control(d, {0.3, 0.0}));
    for (double v : r.distance) EXPECT_EQ(v, 0.0);
}

TEST(Contraction, RandomPairsNonincreasing) {
    std::mt19937_64 rng(41);
    const DomainSpec d = domain_1d(6.0, 64, 32, 0.5, 0.5);
    for (int trial = 0; trial < 5; ++trial) {
        const VectorTrajectory u = random_control(d, rng, 1.0);
        const ContractionReport r = l1_contraction_check(mfg::test::random_field(d, rng, 0.0, 1.0),
                                                         mfg::test::random_field(d, rng, 0.0, 1.0), u);
        EXPECT_TRUE(r.bounded);
        EXPECT_TRUE(r.nonincreasing);
    }
}

TEST(Contraction, DisjointBumpsStrictlyDecrease) {
    const DomainSpec d = domain_1d(8.0, 128, 32, 1.0, 0.5);
    const ContractionReport r =
        l1_contraction_check(gaussian(d, 0.2, -2.0), gaussian(d, 0.2, 2.0), make_vector_trajectory(d));
    for (std::size_t k = 1; k < r.distance.size(); ++k) EXPECT_LT(r.distance[k], r.distance[k - 1]);
}

TEST(LogDensity, PositiveGaussianFinite) {
    const DomainSpec d = domain_1d(6.0, 64, 32, 0.5, 0.5);
    const FpTrajectory t = solve_fp(gaussian(d, 1.0), constant_control(d, {0.5, 0.0}));
    const LogDensityReport r = log_density_check(t, gaussian(d, 0.5));
    EXPECT_TRUE(r.finite);
    EXPECT_FALSE(r.zero_cell);
    for (std::size_t k = 1; k < r.profile.size(); ++k)
        EXPECT_LT(std::abs(r.profile[k] - r.profile[k - 1]), 0.1 * r.profile[0] + 1e-12);
}

TEST(LogDensity, ZeroCellFlaggedAndZeroWeight) {
    const DomainSpec d = domain_1d(6.0, 64, 32, 0.5, 0.5);
    ScalarField rho0 = gaussian(d, 1.0);
    rho0[32] = 0.0;
    const FpTrajectory t = solve_fp(rho0, make_vector_trajectory(d));
    EXPECT_TRUE(log_density_check(t, gaussian(d, 0.5)).zero_cell);
    const LogDensityReport z = log_density_check(solve_fp(gaussian(d, 1.0), make_vector_trajectory(d)),
                                                 ScalarField(d, 0.0));
    EXPECT_EQ(z.max, 0.0);
}

TEST(Decay, DeltaScaledNormBounded) {
    const DomainSpec d = domain_1d(8.0, 256, 200, 1.0, 0.5);
    ScalarField delta(d);
    delta[d.points / 2] = 1.0 / d.dx();
    const FpTrajectory t = solve_fp(delta, constant_control(d, {1.0, 0.0}));
    const DecayReport r = measure_decay(t, 1.2, 0.05, 0.5);
    EXPECT_GT(r.constant, 0.0);
    EXPECT_LE(r.constant, 2.0 * r.heat_constant);
}

TEST(Regularize, BoundedByN) {
    const DomainSpec d = domain_1d(6.0, 64, 8, 0.5, 0.5);
    const ScalarField r = regularize_initial(gaussian(d, 0.01), 2.0);
    EXPECT_LT(r.max(), 2.0);
    EXPECT_GE(r.min(), 0.0);
}
