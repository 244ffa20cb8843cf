#pragma once

#include <vector>

#include "mfg/convex.hpp"
#include "mfg/grid.hpp"
#include "mfg/spectral.hpp"

namespace mfg {

struct FpOptions {
    KernelConvention convention = KernelConvention::OperatorConsistent;
    long max_substeps = 1000000;
    double picard_tol = 1e-10;
    int max_picard = 200;
};

struct FpDiagnostics {
    std::vector<double> mass;
    std::vector<double> min_value;
    std::vector<double> l1;
    long substeps = 0;
    int picard_iterations = 0;   ///< total over slabs (mild form only)
    double picard_residual = 0;  ///< last increment (mild form only)
    int slabs = 0;
    double boundary_fraction = 0;  ///< max over slices of boundary-band mass fraction
};

struct FpTrajectory {
    ScalarField initial;
    ScalarTrajectory slices;  ///< N_T + 1 slices, slices[0] = initial
    VectorTrajectory control;
    FpDiagnostics diagnostics;
};

/// One step: upwind transport of the flux u rho (sub-stepped to satisfy
/// dt_sub <= 0.9 dx / (2 d |u|_inf)), then a backward-Euler diffusion solve
/// in Fourier space. Mass is returned exactly; values are nonnegative when
/// the input is.
ScalarField step_fp(const ScalarField& rho, const VectorField& u, double dt, double nu,
                    long max_substeps = 1000000, long* substeps_used = nullptr);

/// Marches step_fp over all N_T steps with u[k] driving step k -> k+1.
FpTrajectory solve_fp(const ScalarField& rho0, const VectorTrajectory& u, const FpOptions& options = {});

/// Picard iteration on the Duhamel form rho = E rho0 - int grad E * (u rho),
/// integrated exactly per Fourier mode for a source linear in time on each
/// step. Slabs are halved until the iteration converges on each of them.
FpTrajectory solve_fp_mild(const ScalarField& rho0, const VectorTrajectory& u, const FpOptions& options = {});

/// rho0 / (1 + rho0 / n).
ScalarField regularize_initial(const ScalarField& rho0, double n);

struct ContractionReport {
    std::vector<double> distance;  ///< |rho_a(t_k) - rho_b(t_k)|_1
    double initial_distance = 0;
    bool bounded = true;           ///< distance <= initial (1 + 1e-10) at every step
    bool nonincreasing = true;
};

ContractionReport l1_contraction_check(const ScalarField& rho0_a, const ScalarField& rho0_b,
                                       const VectorTrajectory& u, const FpOptions& options = {});

struct LogDensityReport {
    std::vector<double> profile;  ///< int psi |log rho(t_k)|
    double max = 0;
    double initial_term = 0;      ///< int psi |log rho0|
    double measured_c1 = 0;       ///< (max - initial_term) / (|u|_inf (|psi|_1 + |grad psi|_1))
    bool finite = true;
    bool zero_cell = false;       ///< rho0 vanishes somewhere on supp psi
};

LogDensityReport log_density_check(const FpTrajectory& traj, const ScalarField& weight);

struct DecayReport {
    std::vector<double> times;
    std::vector<double> scaled;  ///< |rho(t)|_m t^{(d/2)(1-1/m)}
    double constant = 0;         ///< max of scaled
    double heat_constant = 0;    ///< same quantity for the pure heat kernel
};

/// Measures |rho(t)|_m t^{(d/2)(1-1/m)} over slices with t >= t_min.
DecayReport measure_decay(const FpTrajectory& traj, double m, double t_min, double diffusivity);

}  // namespace mfg
