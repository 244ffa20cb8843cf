#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mfg/fokker_planck.hpp"
#include "mfg/grid.hpp"

namespace mfg {

/// Normal increments come from std::mt19937_64 through
/// std::normal_distribution, one generator per block of particles per step.
inline constexpr const char* kParticleGenerator = "mt19937_64+normal_distribution";
inline constexpr std::size_t kParticleBlock = 4096;

struct ParticleEnsemble {
    DomainSpec domain;
    std::vector<double> positions;  ///< particle-major, d entries per particle
    std::uint64_t seed = 0;
    long step = 0;

    std::size_t size() const { return domain.dim == 0 ? 0 : positions.size() / domain.dim; }
};

/// Draws n particles from a nonnegative density: a cell by its weight, then
/// a triangular jitter of one cell width per axis.
ParticleEnsemble sample_ensemble(const ScalarField& density, std::size_t n, std::uint64_t seed);

/// Linear (d = 1) or bilinear (d = 2) periodic interpolation of u at x.
std::array<double, 2> interpolate(const VectorField& u, std::span<const double> x);

/// X <- X + u(X) dt + sqrt(2 nu dt) N(0, I), wrapped into [-L, L).
void euler_maruyama_step(ParticleEnsemble& ensemble, const VectorField& u, double dt, double nu);

/// Cloud-in-cell histogram with total mass 1.
ScalarField empirical_density(const ParticleEnsemble& ensemble, const DomainSpec& domain);

/// Empirical densities at every time slice of a run driven by u.
struct ParticleRun {
    std::vector<ScalarField> densities;  ///< N_T + 1 slices
    std::uint64_t seed = 0;
    std::size_t particles = 0;
    std::string generator = kParticleGenerator;
};

/// Simulates from `initial` with u[k] driving step k -> k + 1; `diffusivity`
/// is the coefficient D in sqrt(2 D dt).
ParticleRun simulate_particles(ParticleEnsemble initial, const VectorTrajectory& u, double diffusivity);

struct DistanceProfile {
    std::vector<double> times;
    std::vector<double> distance;  ///< L1 distance per shared slice
    double max = 0;
    double plateau = 0;            ///< mean over the later half of the slices
};

DistanceProfile compare_fp(const ParticleRun& run, const FpTrajectory& fp);

}  // namespace mfg
