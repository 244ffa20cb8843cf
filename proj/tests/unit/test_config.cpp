#include <gtest/gtest.h>

#include <algorithm>

#include "mfg/config.hpp"

using namespace mfg;

namespace {

const char* kMinimal = R"(
[domain]
dim = 1
half_width = 8
points = 128
time_steps = 64
horizon = 0.5
nu = 0.5

[problem]
control_bound = 1
hamiltonian = sqrt
)";

std::vector<std::string> violations(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.violations();
    }
    return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
    return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST(Config, MinimalFileFillsDefaults) {
    const SolverConfig c = parse_config(kMinimal);
    EXPECT_EQ(c.domain.points, 128);
    EXPECT_EQ(c.hamiltonian_name, "sqrt");
    EXPECT_EQ(c.lagrangian_name, "sqrt-lagrangian");
    EXPECT_EQ(c.g0_name, "quadratic");
    EXPECT_EQ(c.options.schedule.ladder, (std::vector<double>{1.0, 0.3, 0.1, 0.03, 0.01}));
    EXPECT_EQ(c.options.schedule.theta, 0.5);
    EXPECT_EQ(c.run.seed, 1u);
    EXPECT_EQ(c.problem.convention, KernelConvention::OperatorConsistent);
    EXPECT_NEAR(c.problem.rho0.mass(), 1.0, 1e-12);
    EXPECT_TRUE(c.hypotheses.at("control set bounded"));
    EXPECT_TRUE(c.hypotheses.at("terminal cost quadratic envelope"));
}

TEST(Config, NegativeControlBound) {
    const auto v = violations(std::string(kMinimal) + "");
    EXPECT_TRUE(v.empty());
    std::string text = kMinimal;
    text.replace(text.find("control_bound = 1"), 17, "control_bound = -1");
    const auto bad = violations(text);
    ASSERT_EQ(bad.size(), 1u);
    EXPECT_TRUE(mentions(bad, "control bound must be positive (bounded control set)"));
}

TEST(Config, TerminalCostEnvelope) {
    const auto v = violations(std::string(kMinimal) + "g0 = quartic\n");
    ASSERT_FALSE(v.empty());
    EXPECT_TRUE(mentions(v, "problem.g0"));
    EXPECT_TRUE(mentions(v, "terminal cost quadratic envelope"));
}

TEST(Config, AllViolationsReported) {
    const auto v = violations(R"(
[domain]
points = 100
nu = -1
mystery = 3
[problem]
hamiltonian = norm
control_bound = 0.5
hamiltonian.a = 2
[solver]
damping = 2
[colour]
x = 1
)");
    EXPECT_GE(v.size(), 5u);
    EXPECT_TRUE(mentions(v, "domain.points"));
    EXPECT_TRUE(mentions(v, "domain.nu"));
    EXPECT_TRUE(mentions(v, "domain.mystery"));
    EXPECT_TRUE(mentions(v, "colour"));
    EXPECT_TRUE(mentions(v, "damping must lie in (0, 1]"));
    EXPECT_TRUE(mentions(v, "(bounded control set)"));
}

TEST(Config, LagrangianRoute) {
    const SolverConfig c = parse_config(R"(
[domain]
dim = 2
points = 16
[problem]
control_bound = 2
lagrangian = ball-indicator
g = step-coupling
g.slope = 1
g.jump.1.at = 0.1
g.jump.1.height = 0.5
)");
    EXPECT_EQ(c.hamiltonian_name, "norm");
    EXPECT_EQ(c.problem.hamiltonian->lipschitz_constant(), 2.0);
    EXPECT_TRUE(c.hypotheses.at("uniqueness (strictly convex g)"));
}

TEST(Config, NonStrictCouplingRecordedNotFatal) {
    const SolverConfig c = parse_config(std::string(kMinimal) + "g = linear\n");
    EXPECT_FALSE(c.hypotheses.at("uniqueness (strictly convex g)"));
}

TEST(Config, MissingFile) {
    EXPECT_THROW(load_config("/nonexistent/mfg.ini"), ConfigError);
}
