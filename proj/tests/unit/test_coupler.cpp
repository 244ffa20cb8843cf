#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "mfg/coupler.hpp"
#include "mfg/presets.hpp"

using namespace mfg;
using mfg::test::domain_1d;
using mfg::test::domain_2d;
using mfg::test::gaussian;

namespace {

MfgProblem quadratic_problem(double a = 1.0) {
    MfgProblem p;
    p.domain = domain_1d(8.0, 128, 64, 0.5, 0.5);
    p.hamiltonian = make_integrand("sqrt", {{"a", a}});
    p.lagrangian = make_integrand("sqrt-lagrangian", {{"a", a}});
    p.g = make_integrand("quadratic", {{"c", 1.0}});
    p.g0 = make_integrand("quadratic", {{"c", 1.0}});
    p.rho0 = gaussian(p.domain, 1.0);
    return p;
}

MfgProblem decoupled_problem() {
    MfgProblem p = quadratic_problem();
    p.hamiltonian = make_integrand("norm", {{"a", 1.0}});
    p.lagrangian = make_integrand("ball-indicator", {{"a", 1.0}});
    p.g = make_integrand("zero");
    p.g0 = make_integrand("zero");
    return p;
}

const MfgState& converged_quadratic() {
    static const MfgState state = solve_mfg(quadratic_problem());
    return state;
}

ScalarTrajectory heat_trajectory(const DomainSpec& d, double s0) {
    ScalarTrajectory rho;
    for (int k = 0; k <= d.time_steps; ++k) rho.push_back(gaussian(d, s0 + 2 * d.nu * k * d.dt()));
    return rho;
}

}  // namespace

TEST(CostJ, ZeroEverything) {
    const DomainSpec d = domain_1d(6.0, 64, 16, 0.5, 0.5);
    const auto zero = make_integrand("zero");
    EXPECT_EQ(cost_J(make_vector_trajectory(d), heat_trajectory(d, 1.0), *make_integrand("quadratic"), *zero, *zero),
              0.0);
}

TEST(CostJ, QuadraticCouplingQuadratureOracle) {
    // int G_v^2 / 2 dx = 1 / (2 sqrt(4 pi v)), trapezoid in time.
    const DomainSpec d = domain_1d(12.0, 256, 32, 0.5, 0.5);
    const ScalarTrajectory rho = heat_trajectory(d, 1.0);
    double oracle = 0.0;
    for (int k = 0; k <= d.time_steps; ++k) {
        const double v = 1.0 + 2 * d.nu * k * d.dt();
        const double w = (k == 0 || k == d.time_steps) ? 0.5 : 1.0;
        oracle += w * d.dt() / (2.0 * std::sqrt(4 * std::numbers::pi * v));
    }
    const double J = cost_J(make_vector_trajectory(d), rho, *make_integrand("quadratic"),
                            *make_integrand("quadratic", {{"c", 1.0}}), *make_integrand("zero"));
    EXPECT_NEAR(J, oracle, 1e-8);
}

TEST(CostJ, IndicatorLagrangianLeavesCouplingOnly) {
    const DomainSpec d = domain_1d(6.0, 64, 16, 0.5, 0.5);
    const ScalarTrajectory rho = heat_trajectory(d, 1.0);
    const auto g = make_integrand("quadratic", {{"c", 1.0}});
    const auto L = make_integrand("ball-indicator", {{"a", 1.0}});
    const double base = cost_J(make_vector_trajectory(d), rho, *L, *g, *g);
    EXPECT_NEAR(cost_J(constant_control(d, {0.8, 0.0}), rho, *L, *g, *g), base, 1e-14);
    EXPECT_THROW(cost_J(constant_control(d, {1.5, 0.0}), rho, *L, *g, *g), std::domain_error);
}

TEST(PenalizedCost, ClosedFormForQuadraticCoupling) {
    const DomainSpec d = domain_1d(12.0, 256, 32, 0.5, 0.5);
    const ScalarTrajectory rho = heat_trajectory(d, 1.0);
    const auto g = make_integrand("quadratic", {{"c", 1.0}});
    const auto L = make_integrand("quadratic", {{"c", 1.0}});
    const VectorTrajectory u = constant_control(d, {0.4, 0.0});
    const double eps = 0.3;
    // Moreau envelope of r^2/2 is r^2 / (2 (1 + eps)); mass 1 per slice.
    double oracle = 0.0;
    for (int k = 0; k <= d.time_steps; ++k) {
        const double v = 1.0 + 2 * d.nu * k * d.dt();
        const double w = (k == 0 || k == d.time_steps) ? 0.5 : 1.0;
        oracle += w * d.dt() * (0.08 + 1.0 / (2.0 * (1 + eps) * std::sqrt(4 * std::numbers::pi * v)));
    }
    const double vT = 1.0 + 2 * d.nu * d.horizon;
    oracle += 1.0 / (2.0 * (1 + eps) * std::sqrt(4 * std::numbers::pi * vT));
    EXPECT_NEAR(penalized_cost(u, rho, u, ScalarField(d, 5.0), eps, *L, *g, *g), oracle, 1e-8);
    EXPECT_LE(penalized_cost(u, rho, u, ScalarField(d), 10.0, *L, *g, *g), cost_J(u, rho, *L, *g, *g));
    // Penalty: 1/2 phi |du|^2 per unit mass.
    const double with = penalized_cost(u, rho, constant_control(d, {0.0, 0.0}), ScalarField(d, 2.0), eps, *L, *g, *g);
    EXPECT_NEAR(with - oracle, 0.5 * 2.0 * 0.16 * d.horizon, 1e-8);
}

TEST(BestResponse, FreeBoundaryInteriorAndSaturation) {
    const DomainSpec d = domain_2d(3.0, 8, 2, 0.5, 0.5);
    const auto H = make_integrand("norm", {{"a", 1.0}});
    VectorTrajectory q = make_vector_trajectory(d);
    for (const auto& u : best_response(q, *H)) EXPECT_EQ(u.sup_norm(), 0.0);
    q[1].set(5, std::vector<double>{2.0, 0.0});
    const auto u = best_response(q, *H);
    EXPECT_NEAR(u[1].at(5)[0], 1.0, 1e-15);
    EXPECT_EQ(u[1].at(5)[1], 0.0);
}

TEST(BestResponse, SmoothHamiltonianMatchesFiniteDifference) {
    const DomainSpec d = domain_1d(3.0, 16, 2, 0.5, 0.5);
    const auto H = make_integrand("sqrt", {{"a", 1.5}});
    VectorTrajectory q = make_vector_trajectory(d);
    for (std::size_t i = 0; i < d.cells(); ++i) q[0].component(0)[i] = -2.0 + 0.25 * i;
    const auto u = best_response(q, *H);
    const double h = 1e-6;
    for (std::size_t i = 0; i < d.cells(); ++i) {
        const double x = q[0].component(0)[i];
        EXPECT_NEAR(u[0].component(0)[i], (H->value(x + h) - H->value(x - h)) / (2 * h), 1e-6);
    }
}

TEST(CouplingEta, QuadraticExactLevel) {
    const DomainSpec d = domain_1d(6.0, 64, 4, 0.5, 0.5);
    const ScalarTrajectory rho = heat_trajectory(d, 1.0);
    const ScalarTrajectory eta = coupling_eta(rho, *make_integrand("quadratic", {{"c", 1.0}}), 0.0);
    for (std::size_t k = 0; k < rho.size(); ++k)
        for (std::size_t i = 0; i < d.cells(); ++i) EXPECT_NEAR(eta[k][i], rho[k][i], 1e-15);
}

TEST(CouplingEta, StepCouplingAtJumpLiesInInterval) {
    const DomainSpec d = domain_1d(6.0, 16, 2, 0.5, 0.5);
    const auto g = make_integrand("step-coupling", {{"slope", 1.0}, {"jump.1.at", 0.1}, {"jump.1.height", 0.5}});
    ScalarTrajectory rho = make_scalar_trajectory(d, 0.1);
    {
        for (const auto& s : coupling_eta(rho, *g, 0.0)) {
            for (std::size_t i = 0; i < d.cells(); ++i) {
                EXPECT_GE(s[i], 0.1 - 1e-12);
                EXPECT_LE(s[i], 0.6 + 1e-12);
            }
        }
    }
}

TEST(CouplingEta, LadderConvergesMonotonically) {
    const DomainSpec d = domain_1d(6.0, 64, 4, 0.5, 0.5);
    const ScalarTrajectory rho = heat_trajectory(d, 1.0);
    const auto g = make_integrand("quartic", {{"c", 1.0}});
    const ScalarTrajectory exact = coupling_eta(rho, *g, 0.0);
    double prev = kInfinity;
    for (double eps : {1.0, 0.3, 0.1, 0.03, 0.01}) {
        const ScalarTrajectory e = coupling_eta(rho, *g, eps);
        double dist = 0.0;
        for (std::size_t k = 0; k < rho.size(); ++k) dist += l1_distance(e[k], exact[k]);
        EXPECT_LT(dist, prev);
        prev = dist;
    }
}

TEST(CouplingEta, MonotoneInDensity) {
    const DomainSpec d = domain_1d(6.0, 64, 4, 0.5, 0.5);
    const ScalarTrajectory rho = heat_trajectory(d, 1.0);
    const auto g = make_integrand("step-coupling", {{"slope", 1.0}, {"jump.1.at", 0.1}, {"jump.1.height", 0.5}});
    for (double eps : {0.1, 0.0}) {
        const ScalarTrajectory eta = coupling_eta(rho, *g, eps);
        for (std::size_t k = 0; k < rho.size(); ++k)
            for (std::size_t i = 0; i < d.cells(); ++i)
                for (std::size_t j = 0; j < d.cells(); ++j)
                    if (rho[k][i] > rho[k][j]) {
                        EXPECT_GE(eta[k][i], eta[k][j]);
                    }
    }
}

TEST(SolveMfg, DecoupledCaseConvergesImmediately) {
    const MfgProblem p = decoupled_problem();
    const MfgState s = solve_mfg(p);
    EXPECT_TRUE(s.converged);
    EXPECT_LE(s.outer_iterations, 2);
    for (const auto& u : s.u) EXPECT_EQ(u.sup_norm(), 0.0);
    const FpTrajectory heat = solve_fp(p.rho0, make_vector_trajectory(p.domain));
    for (std::size_t k = 0; k < heat.slices.size(); ++k) EXPECT_LT(l1_distance(s.rho.slices[k], heat.slices[k]), 1e-14);
}

TEST(SolveMfg, HandBuiltDecoupledSolutionHasZeroResiduals) {
    const MfgProblem p = decoupled_problem();
    MfgState s;
    s.u = make_vector_trajectory(p.domain);
    s.rho = solve_fp(p.rho0, s.u);
    s.eta = make_scalar_trajectory(p.domain);
    s.eta0 = ScalarField(p.domain);
    s.p = solve_hjb(s.eta, s.eta0, *p.hamiltonian);
    const ResidualReport r = optimality_residual(s, p);
    EXPECT_LT(r.max(), 1e-10);
}

TEST(SolveMfg, QuadraticPresetConverges) {
    const MfgState& s = converged_quadratic();
    EXPECT_TRUE(s.converged) << s.status;
    EXPECT_LE(s.outer_iterations, 200);
    const ResidualReport r = optimality_residual(s, quadratic_problem());
    EXPECT_LT(r.fp, 1e-6);
    EXPECT_LT(r.hjb, 1e-6);
    EXPECT_LT(r.fenchel_gap, 1e-6);
    EXPECT_LT(r.coupling_gap, 1e-6);
    for (const auto& u : s.u) EXPECT_LE(u.sup_norm(), 1.0 + 1e-12);
    for (const auto& rho : s.rho.slices) {
        EXPECT_NEAR(rho.mass(), 1.0, 1e-12);
        EXPECT_GE(rho.min(), 0.0);
    }
}

TEST(SolveMfg, ResidualNonincreasingAcrossLevels) {
    // Residual against the unregularized system, coupling gap included, at the end of each level.
    const MfgState& s = converged_quadratic();
    std::vector<double> level_end;
    for (std::size_t i = 0; i < s.history.size(); ++i)
        if (i + 1 == s.history.size() || s.history[i + 1].level != s.history[i].level)
            level_end.push_back(s.history[i].residuals.max());
    ASSERT_GE(level_end.size(), 2u);
    for (std::size_t i = 1; i < level_end.size(); ++i) EXPECT_LE(level_end[i], level_end[i - 1] * (1 + 1e-9));
}

TEST(SolveMfg, CostNonincreasingForSmallDamping) {
    MfgOptions o;
    o.schedule.ladder = {0.1};
    o.schedule.exact_final_level = false;
    o.schedule.theta = 0.1;
    o.max_outer = 40;
    o.tol = 1e-6;
    const MfgState s = solve_mfg(quadratic_problem(), o);
    for (std::size_t i = 1; i < s.history.size(); ++i)
        EXPECT_LE(s.history[i].cost, s.history[i - 1].cost + 1e-8) << i;
}

TEST(OptimalityResidual, PerturbationInflatesFenchelGap) {
    const MfgProblem p = quadratic_problem();
    MfgState s = converged_quadratic();
    const double base = optimality_residual(s, p).fenchel_gap;
    for (auto& u : s.u) u *= 1.1;
    const double perturbed = optimality_residual(s, p).fenchel_gap;
    EXPECT_GE(perturbed, 10.0 * base);
    EXPECT_GT(perturbed, 1e-6);
}

TEST(Uniqueness, IdenticalInitsGiveZero) {
    const MfgProblem p = quadratic_problem();
    const VectorTrajectory u0 = make_vector_trajectory(p.domain);
    const UniquenessReport r = uniqueness_probe(p, {}, u0, u0);
    EXPECT_EQ(r.rho_distance, 0.0);
    EXPECT_TRUE(r.guaranteed);
}

TEST(Uniqueness, DistinctInitsAgree) {
    const MfgProblem p = quadratic_problem();
    const UniquenessReport r = uniqueness_probe(p, {}, make_vector_trajectory(p.domain),
                                                constant_control(p.domain, {0.5, 0.0}));
    EXPECT_TRUE(r.converged_a && r.converged_b);
    EXPECT_LT(r.rho_distance, 1e-5);
}

TEST(Uniqueness, LinearCouplingNotGuaranteed) {
    MfgProblem p = quadratic_problem();
    p.g = make_integrand("linear", {{"c", 1.0}});
    MfgOptions o;
    o.max_outer = 60;
    const UniquenessReport r = uniqueness_probe(p, o, make_vector_trajectory(p.domain),
                                                constant_control(p.domain, {0.5, 0.0}));
    EXPECT_FALSE(r.guaranteed);
    EXPECT_EQ(r.note, "uniqueness not guaranteed");
    EXPECT_GE(r.rho_distance, 0.0);
}

TEST(EpsSchedule, Validation) {
    EpsSchedule s;
    EXPECT_NO_THROW(s.validate());
    s.ladder = {0.1, 0.3};
    EXPECT_ANY_THROW(s.validate());
    s.ladder = {1.0, -0.1};
    EXPECT_ANY_THROW(s.validate());
}
