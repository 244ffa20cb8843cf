#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mfg/convex.hpp"
#include "mfg/presets.hpp"

using namespace mfg;

namespace {

double lattice_sup(const ConvexIntegrand& f, double v, double radius, int n) {
    double best = -kInfinity;
    for (int i = 0; i <= n; ++i) {
        const double u = -radius + 2.0 * radius * i / n;
        const double fu = f.value(u);
        if (std::isfinite(fu)) best = std::max(best, u * v - fu);
    }
    return best;
}

}  // namespace

TEST(Conjugate, SupportFunctionOfBall) {
    const auto f = make_integrand("ball-indicator", {{"a", 2.0}});
    EXPECT_NEAR(conjugate_eval(*f, 3.0, 5.0, 2001), 6.0, 1e-12);
}

TEST(Conjugate, SquaredNormIsSelfConjugate) {
    const auto f = make_integrand("quadratic", {{"c", 1.0}});
    EXPECT_NEAR(conjugate_eval(*f, 1.5, 5.0, 2001), 1.125, 1e-12);
}

TEST(Conjugate, CappedQuadraticAgainstBruteForce) {
    const auto f = make_integrand("quadratic-capped", {{"a", 1.0}});
    const double oracle = lattice_sup(*f, 3.0, 1.0, 100000);
    EXPECT_NEAR(oracle, 2.5, 1e-9);
    EXPECT_NEAR(conjugate_eval(*f, 3.0, 2.0, 2001), oracle, 1e-9);
    EXPECT_NEAR(conjugate_lattice(*f, std::vector<double>{3.0}, 2.0, 2001), oracle, 1e-8);
}

TEST(Subdifferential, NormAtOriginSelectsMinimalNorm) {
    const auto H = make_integrand("norm", {{"a", 2.0}});
    const std::vector<double> q{0.0};
    const auto s = subdiff_select(*H, q);
    ASSERT_EQ(s.value.size(), 1u);
    EXPECT_EQ(s.value[0], 0.0);
    EXPECT_FALSE(s.is_unique);
}

TEST(Subdifferential, NormAwayFromOrigin) {
    const auto H = make_integrand("norm", {{"a", 2.0}});
    const auto s = subdiff_select(*H, std::vector<double>{3.0});
    EXPECT_NEAR(s.value[0], 2.0, 1e-14);
    EXPECT_TRUE(s.is_unique);
}

TEST(Subdifferential, SmoothGradient) {
    const auto f = make_integrand("quadratic", {{"c", 1.0}});
    const auto s = subdiff_select(*f, std::vector<double>{0.7});
    EXPECT_NEAR(s.value[0], 0.7, 1e-14);
    EXPECT_TRUE(s.is_unique);
}

TEST(Fenchel, Examples) {
    const auto q = make_integrand("quadratic", {{"c", 1.0}});
    const auto ball = make_integrand("ball-indicator", {{"a", 2.0}});
    EXPECT_NEAR(fenchel_residual(*q, 1.0, 1.0), 0.0, 1e-14);
    EXPECT_NEAR(fenchel_residual(*ball, 2.0, 5.0), 0.0, 1e-12);
    EXPECT_NEAR(fenchel_residual(*q, 1.0, 2.0), 0.5, 1e-14);
}

TEST(Fenchel, YoungInequalityAndEqualityOnSubgradients) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (const std::string name : {"quadratic", "abs", "huber", "sqrt", "quartic", "norm"}) {
        const auto f = make_integrand(name, {{"a", 1.0}, {"c", 1.0}});
        for (int i = 0; i < 200; ++i) {
            const double u = U(rng), eta = U(rng);
            const double r = fenchel_residual(*f, u, eta);
            if (std::isfinite(r)) {
                EXPECT_GE(r, -1e-12 * (1.0 + std::abs(u * eta))) << name;
            }
            const auto s = subdiff_select(*f, std::vector<double>{u});
            EXPECT_LE(fenchel_residual(*f, u, s.value[0]), 1e-10) << name << " u=" << u;
        }
    }
}

TEST(Resolvent, Examples) {
    const auto quad = make_integrand("quadratic", {{"c", 1.0}});
    const auto abs = make_integrand("abs", {{"c", 1.0}});
    EXPECT_NEAR(resolve(*quad, 0.5, 3.0).point, 2.0, 1e-12);
    EXPECT_NEAR(resolve(*abs, 0.5, 0.3).point, 0.0, 1e-12);
    EXPECT_NEAR(resolve(*abs, 0.5, 2.0).point, 1.5, 1e-12);
}

TEST(Resolvent, BisectionMatchesAnalytic) {
    const auto abs = make_integrand("abs", {{"c", 1.0}});
    const auto graph = abs->subdifferential_graph();
    ASSERT_TRUE(graph);
    for (double q : {-2.0, -0.4, 0.0, 0.3, 0.51, 2.0})
        EXPECT_NEAR(resolvent(*graph, 0.5, q), resolve(*abs, 0.5, q).point, 1e-10) << q;
}

TEST(Yosida, ValueExamples) {
    const auto quad = make_integrand("quadratic", {{"c", 1.0}});
    const auto abs = make_integrand("abs", {{"c", 1.0}});
    EXPECT_NEAR(yosida_value(*quad, 1.0, 2.0), 1.0, 1e-12);
    // Direct minimization over a theta lattice.
    double oracle = kInfinity;
    for (int i = -20000; i <= 20000; ++i) {
        const double th = i * 1e-4;
        oracle = std::min(oracle, (0.3 - th) * (0.3 - th) / (2 * 0.5) + std::abs(th));
    }
    EXPECT_NEAR(oracle, 0.09, 1e-12);
    EXPECT_NEAR(yosida_value(*abs, 0.5, 0.3), oracle, 1e-12);
    // At a minimizer of g the envelope agrees with g.
    EXPECT_NEAR(yosida_value(*abs, 0.7, 0.0), 0.0, 1e-14);
}

TEST(Yosida, GradientExamples) {
    const auto quad = make_integrand("quadratic", {{"c", 1.0}});
    const auto abs = make_integrand("abs", {{"c", 1.0}});
    EXPECT_NEAR(yosida_grad(*quad, 1.0, 2.0), 1.0, 1e-12);
    EXPECT_NEAR(yosida_grad(*abs, 0.5, 0.3), 0.6, 1e-12);
    EXPECT_NEAR(yosida_grad(*abs, 0.5, 2.0), 1.0, 1e-12);
}

TEST(Yosida, Properties) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-4.0, 4.0);
    const auto step = make_integrand("step-coupling", {{"slope", 1.0}, {"jump.1.at", 0.1}, {"jump.1.height", 0.5}});
    for (const auto& g : {make_integrand("quadratic", {{"c", 1.0}}), make_integrand("abs", {{"c", 1.0}}),
                          make_integrand("quartic", {{"c", 1.0}}), step}) {
        for (int i = 0; i < 200; ++i) {
            const double q1 = U(rng), q2 = U(rng), eps = 0.05 + 0.5 * std::abs(U(rng));
            EXPECT_LE(std::abs(resolve(*g, eps, q1).point - resolve(*g, eps, q2).point),
                      std::abs(q1 - q2) * (1 + 1e-9) + 1e-12);
            EXPECT_LE(std::abs(yosida_grad(*g, eps, q1) - yosida_grad(*g, eps, q2)),
                      std::abs(q1 - q2) / eps * (1 + 1e-9) + 1e-12);
            double prev = -kInfinity;
            for (double e : {1.0, 0.3, 0.1}) {
                const double v = yosida_value(*g, e, q1);
                EXPECT_GE(v, prev - 1e-12);
                EXPECT_LE(v, g->value(q1) + 1e-12);
                prev = v;
            }
        }
    }
}

TEST(FillJumps, Heaviside) {
    std::vector<double> x, y;
    for (int i = 0; i < 20; ++i) {
        x.push_back(-1.0 + 0.1 * (i + 0.5));
        y.push_back(x.back() < 0 ? 0.0 : 1.0);
    }
    const auto g = fill_jumps(x, y);
    ASSERT_EQ(g.jumps().size(), 1u);
    EXPECT_NEAR(g.jumps()[0].location, 0.0, 1e-12);
    EXPECT_EQ(g.jumps()[0].left, 0.0);
    EXPECT_EQ(g.jumps()[0].right, 1.0);
    const auto [lo, hi] = g.interval(g.jumps()[0].location);
    EXPECT_EQ(lo, 0.0);
    EXPECT_EQ(hi, 1.0);
}

TEST(FillJumps, IdentityHasNoJumps) {
    std::vector<double> x;
    for (int i = 0; i <= 40; ++i) x.push_back(-2.0 + 0.1 * i);
    EXPECT_TRUE(fill_jumps(x, x).single_valued());
}

TEST(FillJumps, Staircase) {
    std::vector<double> x, y;
    for (int i = 0; i < 30; ++i) {
        x.push_back(0.1 * (i + 0.5));
        y.push_back(x.back() < 1.0 ? 0.0 : (x.back() < 2.0 ? 1.0 : 3.0));
    }
    const auto g = fill_jumps(x, y);
    ASSERT_EQ(g.jumps().size(), 2u);
    const MonotoneGraph1D hand([](double r) { return r < 1.0 ? 0.0 : (r < 2.0 ? 1.0 : 3.0); },
                               {{1.0, 0.0, 1.0}, {2.0, 1.0, 3.0}});
    for (std::size_t k = 0; k < 2; ++k) {
        EXPECT_NEAR(g.jumps()[k].location, hand.jumps()[k].location, 1e-12);
        EXPECT_EQ(g.jumps()[k].left, hand.jumps()[k].left);
        EXPECT_EQ(g.jumps()[k].right, hand.jumps()[k].right);
    }
    // Monotone selections.
    for (double a = 0.0; a < 3.0; a += 0.05)
        EXPECT_LE(g.interval(a).second, g.interval(a + 0.05).first + 1e-15);
}

TEST(Hamiltonian, BallIndicatorGivesNorm) {
    const auto H = hamiltonian_from_lagrangian(make_integrand("ball-indicator", {{"a", 1.5}}));
    for (double q : {-2.0, 0.0, 0.4, 3.0}) EXPECT_NEAR(H->value(q), 1.5 * std::abs(q), 1e-12);
}

TEST(Hamiltonian, CappedQuadraticGivesHuber) {
    const double a = 1.0;
    const auto H = hamiltonian_from_lagrangian(make_integrand("quadratic-capped", {{"a", a}}));
    EXPECT_NEAR(H->value(0.6), 0.18, 1e-12);
    EXPECT_NEAR(H->value(2.5), a * 2.5 - a * a / 2, 1e-12);
}

TEST(Hamiltonian, SubgradientBoundedByLipschitzConstant) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-10.0, 10.0);
    for (const std::string name : {"norm", "huber", "sqrt"}) {
        const auto H = make_integrand(name, {{"a", 2.0}});
        for (int i = 0; i < 100; ++i) {
            const auto s = subdiff_select(*H, std::vector<double>{U(rng)});
            EXPECT_LE(std::abs(s.value[0]), H->lipschitz_constant() + 1e-12) << name;
        }
    }
}

TEST(Conjugate, InvolutionOnSmoothPresets) {
    for (const std::string name : {"quadratic", "quartic"}) {
        const auto f = make_integrand(name, {{"c", 1.0}});
        for (double u : {-0.8, 0.1, 0.5}) {
            // f**(u) = sup_v { u v - f*(v) } with f* evaluated on the lattice.
            double best = -kInfinity;
            for (int i = 0; i <= 800; ++i) {
                const double v = -2.0 + 4.0 * i / 800;
                best = std::max(best, u * v - conjugate_lattice(*f, std::vector<double>{v}, 3.0, 2001));
            }
            EXPECT_NEAR(best, f->value(u), 1e-4) << name << " u=" << u;
        }
    }
}
