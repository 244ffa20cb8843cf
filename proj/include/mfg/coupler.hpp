#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mfg/convex.hpp"
#include "mfg/fokker_planck.hpp"
#include "mfg/grid.hpp"
#include "mfg/hjb.hpp"

namespace mfg {

struct MfgProblem {
    DomainSpec domain;
    IntegrandPtr lagrangian;
    IntegrandPtr hamiltonian;
    IntegrandPtr g;   ///< running coupling, g(rho)
    IntegrandPtr g0;  ///< terminal coupling
    ScalarField rho0;
    KernelConvention convention = KernelConvention::OperatorConsistent;
};

struct EpsSchedule {
    std::vector<double> ladder{1.0, 0.3, 0.1, 0.03, 0.01};
    double theta = 0.5;
    double theta_decay = 0.7;
    double theta_min = 1e-3;
    int max_per_level = 200;
    double level_tol = 1e-4;
    /// Append an exact level (eps = 0) when g and g0 are differentiable.
    bool exact_final_level = true;

    void validate() const;
};

struct MfgOptions {
    EpsSchedule schedule;
    double tol = 1e-7;             ///< on max(r_FP, r_HJB, fenchel_gap) at the last level
    int max_outer = 400;           ///< total over all levels
    double gradient_tolerance = 1e-8;
    FpOptions fp;
    HjbOptions hjb;
};

struct ResidualReport {
    double fp = 0;
    double hjb = 0;
    double fenchel_gap = 0;
    double coupling_gap = 0;

    double triple() const;
    double max() const;
};

struct IterationRecord {
    int level = 0;
    double eps = 0;
    int iteration = 0;
    double theta = 0;
    double cost = 0;
    ResidualReport residuals;
};

struct MfgState {
    FpTrajectory rho;
    HjbTrajectory p;
    VectorTrajectory u;
    ScalarTrajectory eta;
    ScalarField eta0;
    double cost = 0;
    ResidualReport residuals;
    double fenchel_gap = 0;
    double eps = 0;  ///< level of the returned state
    bool converged = false;
    int outer_iterations = 0;
    std::string status;
    std::vector<IterationRecord> history;
};

/// 1e-12 * mass / measure.
double density_floor(const ScalarField& rho0);

/// Trapezoid in time of sum (L(u) rho + g(rho)) dx, plus int g0(rho(T)).
double cost_J(const VectorTrajectory& u, const ScalarTrajectory& rho, const ConvexIntegrand& L,
              const ConvexIntegrand& g, const ConvexIntegrand& g0);

/// cost_J with g, g0 replaced by their Moreau envelopes at eps, plus
/// 1/2 int phi rho |u - u_ref|^2.
double penalized_cost(const VectorTrajectory& u, const ScalarTrajectory& rho, const VectorTrajectory& u_ref,
                      const ScalarField& phi, double eps, const ConvexIntegrand& L, const ConvexIntegrand& g,
                      const ConvexIntegrand& g0);

/// Minimal-norm element of dH(grad p) per cell; |grad p| < gradient_tolerance
/// is treated as grad p = 0.
VectorTrajectory best_response(const VectorTrajectory& grad_p, const ConvexIntegrand& H,
                               double gradient_tolerance = 1e-8);

/// Per cell g_eps'(rho) for eps > 0, the minimal-norm subgradient for eps = 0.
ScalarTrajectory coupling_eta(const ScalarTrajectory& rho, const ConvexIntegrand& g, double eps);
ScalarField terminal_eta0(const ScalarField& rho_T, const ConvexIntegrand& g0, double eps);

/// Residuals of a state against the system it claims to solve.
ResidualReport optimality_residual(const MfgState& state, const MfgProblem& problem, const MfgOptions& options = {});

/// Damped best-response iteration with eps-continuation. `initial_u`
/// defaults to u = 0.
MfgState solve_mfg(const MfgProblem& problem, const MfgOptions& options = {},
                   const std::optional<VectorTrajectory>& initial_u = std::nullopt);

struct UniquenessReport {
    double rho_distance = 0;  ///< L1(Q_T)
    double p_distance = 0;
    bool guaranteed = false;
    std::string note;
    bool converged_a = false;
    bool converged_b = false;
};

UniquenessReport uniqueness_probe(const MfgProblem& problem, const MfgOptions& options,
                                  const VectorTrajectory& init_a, const VectorTrajectory& init_b);

/// u = c everywhere, all slices.
VectorTrajectory constant_control(const DomainSpec& domain, std::array<double, 2> c);

}  // namespace mfg
