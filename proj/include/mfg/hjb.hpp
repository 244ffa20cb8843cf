#pragma once

#include <cstdint>
#include <vector>

#include "mfg/convex.hpp"
#include "mfg/grid.hpp"
#include "mfg/spectral.hpp"

namespace mfg {

struct HjbOptions {
    KernelConvention convention = KernelConvention::OperatorConsistent;
    double tol = 1e-10;         ///< L1(slab) Picard increment
    int max_iterations = 400;
    double slab_T = 0.0;        ///< 0 selects min(T, 1/(4 c^2)) from the measured constant
    int ratio_pairs = 20;
    std::uint64_t seed = 20240601;
    int max_halvings = 6;
};

struct SlabReport {
    int first_step = 0;
    int last_step = 0;
    double length = 0;
    double ratio = 0;       ///< max measured |G(z)-G(z')| / |z-z'| over random pairs
    int iterations = 0;
    double residual = 0;    ///< |z - G(z) - w|_{L1(slab)} at exit
};

struct HjbDiagnostics {
    std::vector<double> residual_history;  ///< Picard increments, all slabs in order
    double c_hat = 0;                      ///< measured ratio / sqrt(trial length)
    double slab_T = 0;
    double max_ratio = 0;
    double fixed_point_residual = 0;       ///< max over slabs
    int halvings = 0;
    std::vector<SlabReport> slabs;
};

struct HjbTrajectory {
    ScalarTrajectory p;        ///< p(t_k), k = 0..N_T
    VectorTrajectory grad_p;
    ScalarTrajectory source;   ///< eta
    ScalarField terminal;      ///< eta0, with p(T) = -eta0
    HjbDiagnostics diagnostics;
};

ScalarTrajectory time_reverse(const ScalarTrajectory& f);
VectorTrajectory time_reverse(const VectorTrajectory& f);

/// Gamma(z)(t) = int_0^t grad E(t-s) * H(z(s) + shift(s)) ds on the
/// trajectory's own time grid (t_0 = 0), integrated exactly per Fourier mode
/// for an integrand linear in s on each step.
VectorTrajectory gamma_apply(const VectorTrajectory& z, const ConvexIntegrand& H, const HeatKernelSpec& kernel,
                             const VectorTrajectory* shift = nullptr);

/// w(t) = grad E(t) * initial + int_0^t grad E(t-s) * source(s) ds, in the
/// time-reversed frame (initial = p~(0) = -eta0, source = h = -eta~).
VectorTrajectory assemble_w(const ScalarField& initial, const ScalarTrajectory& source, const HeatKernelSpec& kernel);

struct FixedPointResult {
    VectorTrajectory z;
    int iterations = 0;
    double residual = 0;  ///< |z - G(z) - w|_{L1}
    std::vector<double> history;
    bool converged = false;
};

/// Picard iteration z <- Gamma(z) + w on a single slab starting at t = 0.
FixedPointResult solve_grad_fixed_point(const VectorTrajectory& w, const ConvexIntegrand& H,
                                        const HeatKernelSpec& kernel, double tol, int max_iterations,
                                        const VectorTrajectory* shift = nullptr);

/// Largest ratio |G(z)-G(z')|_{L1} / |z-z'|_{L1} over random pairs of smooth,
/// low-wavenumber perturbations of `base`.
double measure_contraction_ratio(const VectorTrajectory& base, const ConvexIntegrand& H,
                                 const HeatKernelSpec& kernel, int pairs, std::uint64_t seed);

/// dp/dt + nu lap p + H(grad p) = eta on (0, T), p(T) = -eta0, through the
/// gradient fixed point of the time-reversed problem, chained over slabs.
HjbTrajectory solve_hjb(const ScalarTrajectory& eta, const ScalarField& eta0, const ConvexIntegrand& H,
                        const HjbOptions& options = {});

/// Finite-difference cross-check: implicit diffusion with the discrete
/// Laplacian and an explicit Godunov Hamiltonian on one-sided differences.
/// H must be a nondecreasing function of |q|.
HjbTrajectory solve_hjb_fd(const ScalarTrajectory& eta, const ScalarField& eta0, const ConvexIntegrand& H,
                           const HjbOptions& options = {});

}  // namespace mfg
