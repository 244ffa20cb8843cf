#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "mfg/hjb.hpp"
#include "mfg/presets.hpp"
#include "mfg/spectral.hpp"

using namespace mfg;
using mfg::test::domain_1d;
using mfg::test::domain_2d;
using mfg::test::gaussian;

namespace {

ScalarTrajectory ramp(const DomainSpec& d) {
    ScalarTrajectory f = make_scalar_trajectory(d);
    for (int k = 0; k <= d.time_steps; ++k)
        for (std::size_t i = 0; i < d.cells(); ++i) f[k][i] = k * 0.1 + d.position(i)[0];
    return f;
}

double max_distance(const ScalarTrajectory& a, const ScalarTrajectory& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, l1_distance(a[k], b[k]));
    return m;
}

}  // namespace

TEST(TimeReverse, Involution) {
    const DomainSpec d = domain_1d(4.0, 16, 8, 1.0, 0.5);
    const ScalarTrajectory f = ramp(d);
    EXPECT_EQ(max_distance(time_reverse(time_reverse(f)), f), 0.0);
    const ScalarTrajectory c = make_scalar_trajectory(d, 2.0);
    EXPECT_EQ(max_distance(time_reverse(c), c), 0.0);
    const ScalarTrajectory r = time_reverse(f);
    EXPECT_LT(r[1][0] - r[0][0], 0.0);
    EXPECT_GT(f[1][0] - f[0][0], 0.0);
}

TEST(Gamma, ConstantHamiltonianAndZeroInput) {
    const DomainSpec d = domain_1d(6.0, 64, 16, 0.5, 0.5);
    std::mt19937_64 rng(2);
    VectorTrajectory z = make_vector_trajectory(d);
    for (auto& s : z)
        for (auto& v : s.component(0)) v = std::uniform_real_distribution<double>(-1, 1)(rng);
    const auto c = make_integrand("constant", {{"c", 3.0}});
    for (const auto& s : gamma_apply(z, *c, {0.5})) EXPECT_LT(s.sup_norm(), 1e-12);
    const auto H = make_integrand("norm", {{"a", 1.0}});
    for (const auto& s : gamma_apply(make_vector_trajectory(d), *H, {0.5})) EXPECT_EQ(s.sup_norm(), 0.0);
}

TEST(AssembleW, ZeroData) {
    const DomainSpec d = domain_1d(6.0, 64, 16, 0.5, 0.5);
    for (const auto& s : assemble_w(ScalarField(d), make_scalar_trajectory(d), {0.5})) EXPECT_EQ(s.sup_norm(), 0.0);
}

TEST(AssembleW, DeltaTerminalIsKernelGradient) {
    const DomainSpec d = domain_1d(8.0, 128, 16, 0.5, 0.5);
    ScalarField delta(d);
    delta[d.points / 2] = 1.0 / d.dx();
    const VectorTrajectory w = assemble_w(delta, make_scalar_trajectory(d), {0.5});
    for (int k = 1; k <= d.time_steps; ++k) {
        VectorField diff = grad_heat_convolve(delta, {0.5}, k * d.dt());
        diff -= w[k];
        EXPECT_LT(diff.sup_norm(), 1e-12);
    }
}

TEST(AssembleW, GaussianTerminalOracle) {
    const DomainSpec d = domain_1d(10.0, 256, 32, 1.0, 0.5);
    const double s = 0.5, D = 0.5;
    const VectorTrajectory w = assemble_w(gaussian(d, s), make_scalar_trajectory(d), {D});
    for (int k = 0; k <= d.time_steps; ++k) {
        const double t = k * d.dt();
        if (t < 0.1) continue;
        const double v = s + 2 * D * t;
        const ScalarField g = gaussian(d, v);
        double err = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            err += std::abs(w[k].component(0)[i] + d.position(i)[0] / v * g[i]) * d.dx();
        EXPECT_LT(err, 1e-4) << "t=" << t;
    }
}

TEST(FixedPoint, ZeroHamiltonianReturnsW) {
    const DomainSpec d = domain_1d(6.0, 64, 16, 0.5, 0.5);
    const VectorTrajectory w = assemble_w(gaussian(d, 1.0), make_scalar_trajectory(d), {0.5});
    const FixedPointResult r = solve_grad_fixed_point(w, *make_integrand("zero"), {0.5}, 1e-12, 10);
    EXPECT_LE(r.iterations, 1);
    for (std::size_t k = 0; k < w.size(); ++k) {
        VectorField diff = r.z[k];
        diff -= w[k];
        EXPECT_EQ(diff.sup_norm(), 0.0);
    }
}

TEST(FixedPoint, ResidualAndRatioScaling) {
    const DomainSpec d = domain_1d(8.0, 128, 64, 2.0, 0.5);
    const auto H = make_integrand("sqrt", {{"a", 3.0}});
    const VectorTrajectory w = assemble_w(gaussian(d, 1.0), make_scalar_trajectory(d), {0.5});
    const FixedPointResult r = solve_grad_fixed_point(w, *H, {0.5}, 1e-12, 400);
    ASSERT_TRUE(r.converged);
    VectorTrajectory g = gamma_apply(r.z, *H, {0.5});
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += w[k];
    EXPECT_LT(l1_space_time_distance(r.z, g), 1e-10);

    const VectorTrajectory half(w.begin(), w.begin() + 33);
    const double full = measure_contraction_ratio(w, *H, {0.5}, 20, 1);
    const double halved = measure_contraction_ratio(half, *H, {0.5}, 20, 1);
    EXPECT_LT(halved, full);
    EXPECT_GE(full / halved, 1.3);
}

TEST(SolveHjb, ZeroHamiltonianIsBackwardHeat) {
    const DomainSpec d = domain_1d(10.0, 256, 64, 1.0, 0.5);
    const HjbTrajectory p = solve_hjb(make_scalar_trajectory(d), gaussian(d, 0.5), *make_integrand("zero"));
    for (int k = 0; k <= d.time_steps; ++k) {
        const double tau = d.horizon - k * d.dt();
        ScalarField oracle = gaussian(d, 0.5 + 2 * 0.5 * tau);
        oracle *= -1.0;
        EXPECT_LT(l1_distance(p.p[k], oracle), 1e-3) << k;
    }
}

TEST(SolveHjb, ConstantHamiltonianShiftsLinearlyInTime) {
    // p_t + nu lap p + c = 0 with p(T) = -eta0 gives p = -heat(eta0, T - t) + c (T - t).
    const DomainSpec d = domain_1d(10.0, 128, 32, 1.0, 0.5);
    const double c = 0.7;
    const ScalarField eta0 = gaussian(d, 0.5);
    const HjbTrajectory p0 = solve_hjb(make_scalar_trajectory(d), eta0, *make_integrand("zero"));
    const HjbTrajectory pc = solve_hjb(make_scalar_trajectory(d), eta0, *make_integrand("constant", {{"c", c}}));
    for (int k = 0; k <= d.time_steps; ++k) {
        const double offset = c * (d.horizon - k * d.dt());
        for (std::size_t i = 0; i < d.cells(); ++i) EXPECT_NEAR(pc.p[k][i] - p0.p[k][i], offset, 1e-10);
    }
}

TEST(SolveHjb, RadialSymmetryPreserved) {
    const DomainSpec d = domain_2d(6.0, 32, 16, 0.5, 0.5);
    const HjbTrajectory p =
        solve_hjb(make_scalar_trajectory(d), gaussian(d, 1.0), *make_integrand("norm", {{"a", 1.0}}));
    const int n = d.points;
    for (const auto& s : p.p) {
        for (int i0 = 1; i0 < n; ++i0) {
            for (int i1 = 1; i1 < n; ++i1) {
                // Reflections and the diagonal swap about the origin cell n/2.
                const double v = s[i0 + n * i1];
                EXPECT_NEAR(v, s[(n - i0) + n * i1], 1e-12);
                EXPECT_NEAR(v, s[i0 + n * (n - i1)], 1e-12);
                EXPECT_NEAR(v, s[i1 + n * i0], 1e-12);
            }
        }
    }
}

TEST(SolveHjb, ChainedSlabsReachSmallResidual) {
    const DomainSpec d = domain_1d(8.0, 128, 128, 4.0, 0.5);
    ScalarTrajectory eta = make_scalar_trajectory(d);
    for (auto& s : eta) s = gaussian(d, 1.0);
    const HjbTrajectory p = solve_hjb(eta, gaussian(d, 1.0), *make_integrand("sqrt", {{"a", 3.0}}));
    EXPECT_GT(p.diagnostics.slabs.size(), 1u);
    EXPECT_LT(p.diagnostics.fixed_point_residual, 1e-8);
    for (const auto& s : p.diagnostics.slabs) EXPECT_LT(s.ratio, 1.0);
}

TEST(SolveHjb, GradientConsistency) {
    const DomainSpec d = domain_1d(8.0, 128, 32, 0.5, 0.5);
    ScalarTrajectory eta = make_scalar_trajectory(d);
    for (auto& s : eta) s = gaussian(d, 1.0);
    const HjbTrajectory p = solve_hjb(eta, gaussian(d, 1.0), *make_integrand("sqrt", {{"a", 1.0}}));
    for (std::size_t k = 0; k < p.p.size(); ++k) {
        VectorField diff = spectral_gradient(p.p[k]);
        diff -= p.grad_p[k];
        EXPECT_LT(lp_norm(diff, 1.0), 1e-6) << k;
    }
}

TEST(SolveHjb, MildAgreesWithFiniteDifferences) {
    const DomainSpec d = domain_1d(8.0, 128, 64, 0.5, 0.5);
    ScalarTrajectory eta = make_scalar_trajectory(d);
    for (auto& s : eta) s = gaussian(d, 1.0);
    for (const std::string name : {"sqrt", "huber", "zero"}) {
        const auto H = make_integrand(name, {{"a", 1.0}});
        const HjbTrajectory a = solve_hjb(eta, gaussian(d, 1.0), *H);
        const HjbTrajectory b = solve_hjb_fd(eta, gaussian(d, 1.0), *H);
        EXPECT_LT(l1_distance(a.p.front(), b.p.front()), 10 * (d.dx() + d.dt())) << name;
    }
}

TEST(SolveHjb, ComparisonWithZeroHamiltonian) {
    const DomainSpec d = domain_1d(8.0, 64, 32, 0.5, 0.5);
    ScalarTrajectory lo = make_scalar_trajectory(d), hi = make_scalar_trajectory(d);
    for (int k = 0; k <= d.time_steps; ++k) {
        lo[k] = gaussian(d, 1.0);
        hi[k] = gaussian(d, 1.0);
        hi[k] += gaussian(d, 0.5, 1.0);
    }
    const auto H = make_integrand("zero");
    const HjbTrajectory a = solve_hjb(lo, ScalarField(d), *H);
    const HjbTrajectory b = solve_hjb(hi, ScalarField(d), *H);
    for (std::size_t k = 0; k < a.p.size(); ++k)
        for (std::size_t i = 0; i < d.cells(); ++i) EXPECT_LE(b.p[k][i], a.p[k][i] + 1e-12);
}
