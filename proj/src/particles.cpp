#include "mfg/particles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace mfg {

namespace {

double wrap(double x, double L) {
    const double period = 2.0 * L;
    double y = std::fmod(x + L, period);
    if (y < 0.0) y += period;
    if (y >= period) y -= period;  // fmod can round up to the period
    return y - L;
}

// Cell coordinate s = (x + L) / dx split into a lattice index and a fraction.
void locate(double x, const DomainSpec& dom, int& i, double& f) {
    const double s = (x + dom.half_width) / dom.dx();
    double fl = std::floor(s);
    f = s - fl;
    i = static_cast<int>(fl) % dom.points;
    if (i < 0) i += dom.points;
}

std::mt19937_64 block_generator(std::uint64_t seed, long step, std::size_t block) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(block)};
    return std::mt19937_64(seq);
}

}  // namespace

ParticleEnsemble sample_ensemble(const ScalarField& density, std::size_t n, std::uint64_t seed) {
    const DomainSpec& dom = density.domain();
    if (!density.nonnegative()) throw std::invalid_argument("particle sampling needs a nonnegative density");
    if (!(density.mass() > 0.0)) throw std::invalid_argument("particle sampling needs positive mass");
    ParticleEnsemble e;
    e.domain = dom;
    e.seed = seed;
    e.positions.resize(n * dom.dim);
    std::discrete_distribution<std::size_t> cell(density.values().begin(), density.values().end());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double dx = dom.dx();
    for (std::size_t b = 0; b * kParticleBlock < n; ++b) {
        auto rng = block_generator(seed, -1, b);
        const std::size_t end = std::min(n, (b + 1) * kParticleBlock);
        for (std::size_t p = b * kParticleBlock; p < end; ++p) {
            const auto x = dom.position(cell(rng));
            for (int a = 0; a < dom.dim; ++a)
                e.positions[p * dom.dim + a] = wrap(x[a] + dx * (unit(rng) + unit(rng) - 1.0), dom.half_width);
        }
    }
    return e;
}

std::array<double, 2> interpolate(const VectorField& u, std::span<const double> x) {
    const DomainSpec& dom = u.domain();
    const int n = dom.points;
    std::array<double, 2> out{0.0, 0.0};
    int i0, i1 = 0;
    double f0, f1 = 0.0;
    locate(x[0], dom, i0, f0);
    const int j0 = (i0 + 1) % n;
    if (dom.dim == 1) {
        const auto& c = u.component(0);
        out[0] = (1.0 - f0) * c[i0] + f0 * c[j0];
        return out;
    }
    locate(x[1], dom, i1, f1);
    const int j1 = (i1 + 1) % n;
    for (int a = 0; a < 2; ++a) {
        const auto& c = u.component(a);
        out[a] = (1.0 - f0) * (1.0 - f1) * c[i0 + n * i1] + f0 * (1.0 - f1) * c[j0 + n * i1] +
                 (1.0 - f0) * f1 * c[i0 + n * j1] + f0 * f1 * c[j0 + n * j1];
    }
    return out;
}

void euler_maruyama_step(ParticleEnsemble& e, const VectorField& u, double dt, double nu) {
    if (!(dt > 0.0)) throw std::invalid_argument("Euler-Maruyama step needs dt > 0");
    const int d = e.domain.dim;
    const double sigma = std::sqrt(2.0 * nu * dt);
    const std::size_t n = e.size();
    for (std::size_t b = 0; b * kParticleBlock < n; ++b) {
        auto rng = block_generator(e.seed, e.step, b);
        std::normal_distribution<double> normal(0.0, 1.0);
        const std::size_t end = std::min(n, (b + 1) * kParticleBlock);
        for (std::size_t p = b * kParticleBlock; p < end; ++p) {
            double* x = e.positions.data() + p * d;
            const auto drift = interpolate(u, std::span<const double>(x, d));
            for (int a = 0; a < d; ++a) {
                double step = drift[a] * dt;
                if (sigma > 0.0) step += sigma * normal(rng);
                x[a] = wrap(x[a] + step, e.domain.half_width);
            }
        }
    }
    ++e.step;
}

ScalarField empirical_density(const ParticleEnsemble& e, const DomainSpec& dom) {
    if (!dom.same_space(e.domain)) throw std::invalid_argument("histogram lattice differs from the ensemble domain");
    ScalarField out(dom, 0.0);
    const std::size_t n = e.size();
    if (n == 0) return out;
    const int N = dom.points;
    const double w = 1.0 / (static_cast<double>(n) * dom.cell_volume());
    for (std::size_t p = 0; p < n; ++p) {
        const double* x = e.positions.data() + p * dom.dim;
        int i0, i1 = 0;
        double f0, f1 = 0.0;
        locate(x[0], dom, i0, f0);
        const int j0 = (i0 + 1) % N;
        if (dom.dim == 1) {
            out[i0] += (1.0 - f0) * w;
            out[j0] += f0 * w;
            continue;
        }
        locate(x[1], dom, i1, f1);
        const int j1 = (i1 + 1) % N;
        out[i0 + N * i1] += (1.0 - f0) * (1.0 - f1) * w;
        out[j0 + N * i1] += f0 * (1.0 - f1) * w;
        out[i0 + N * j1] += (1.0 - f0) * f1 * w;
        out[j0 + N * j1] += f0 * f1 * w;
    }
    out *= 1.0 / out.mass();
    return out;
}

ParticleRun simulate_particles(ParticleEnsemble e, const VectorTrajectory& u, double diffusivity) {
    const DomainSpec& dom = e.domain;
    if (u.size() != static_cast<std::size_t>(dom.time_steps) + 1)
        throw std::invalid_argument("control must have N_T + 1 slices");
    ParticleRun run;
    run.seed = e.seed;
    run.particles = e.size();
    run.densities.reserve(u.size());
    run.densities.push_back(empirical_density(e, dom));
    for (int k = 0; k < dom.time_steps; ++k) {
        euler_maruyama_step(e, u[k], dom.dt(), diffusivity);
        ScalarField f = empirical_density(e, dom);
        f.set_time_index(k + 1);
        run.densities.push_back(std::move(f));
    }
    return run;
}

DistanceProfile compare_fp(const ParticleRun& run, const FpTrajectory& fp) {
    DistanceProfile d;
    const std::size_t n = std::min(run.densities.size(), fp.slices.size());
    if (n == 0) return d;
    const double dt = fp.slices.front().domain().dt();
    for (std::size_t k = 0; k < n; ++k) {
        d.times.push_back(k * dt);
        d.distance.push_back(l1_distance(run.densities[k], fp.slices[k]));
        d.max = std::max(d.max, d.distance.back());
    }
    const std::size_t start = n / 2;
    double s = 0.0;
    for (std::size_t k = start; k < n; ++k) s += d.distance[k];
    d.plateau = s / static_cast<double>(n - start);
    return d;
}

}  // namespace mfg
