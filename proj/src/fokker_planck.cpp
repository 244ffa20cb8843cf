#include "mfg/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mfg {

namespace {

double max_abs_component(const VectorField& u) {
    double m = 0.0;
    for (int a = 0; a < u.dim(); ++a)
        for (double v : u.component(a)) m = std::max(m, std::abs(v));
    return m;
}

// Explicit upwind transport in flux form; face velocity is the average of
// the two adjacent cell values.
void transport_substep(std::vector<double>& rho, const VectorField& u, double dt, std::vector<double>& scratch) {
    const DomainSpec& dom = u.domain();
    const double r = dt / dom.dx();
    scratch = rho;
    std::vector<double> flux(rho.size());
    for (int a = 0; a < dom.dim; ++a) {
        const auto& ua = u.component(a);
        for (std::size_t i = 0; i < rho.size(); ++i) {
            const std::size_t j = periodic_neighbor(dom, i, a, 1);
            const double uf = 0.5 * (ua[i] + ua[j]);
            flux[i] = uf > 0.0 ? uf * scratch[i] : uf * scratch[j];
        }
        for (std::size_t i = 0; i < rho.size(); ++i) rho[i] -= r * (flux[i] - flux[periodic_neighbor(dom, i, a, -1)]);
    }
}

void record(FpDiagnostics& d, const ScalarField& f) {
    d.mass.push_back(f.mass());
    d.min_value.push_back(f.min());
    d.l1.push_back(lp_norm(f, 1.0));
    d.boundary_fraction = std::max(d.boundary_fraction, boundary_mass_fraction(f));
}

void check_inputs(const ScalarField& rho0, const VectorTrajectory& u) {
    const DomainSpec& dom = rho0.domain();
    if (u.size() != static_cast<std::size_t>(dom.time_steps) + 1)
        throw std::invalid_argument("control must have N_T + 1 slices");
    for (const auto& v : u)
        if (!v.domain().same_space(dom)) throw std::invalid_argument("control lives on a different lattice");
    if (!rho0.all_finite()) throw std::invalid_argument("initial density has non-finite values");
}

}  // namespace

ScalarField step_fp(const ScalarField& rho, const VectorField& u, double dt, double nu, long max_substeps,
                    long* substeps_used) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_fp requires dt > 0");
    const DomainSpec& dom = rho.domain();
    const double umax = max_abs_component(u);
    long n_sub = 1;
    if (umax > 0.0) {
        const double dt_max = 0.9 * dom.dx() / (2.0 * dom.dim * umax);
        const double need = std::ceil(dt / dt_max);
        if (need > static_cast<double>(max_substeps))
            throw std::runtime_error("CFL sub-step count " + std::to_string(need) + " exceeds the limit");
        n_sub = std::max(1L, static_cast<long>(need));
    }
    if (substeps_used) *substeps_used = n_sub;

    const double mass_in = rho.mass();
    std::vector<double> v = rho.values(), scratch;
    if (umax > 0.0) {
        const double h = dt / n_sub;
        for (long s = 0; s < n_sub; ++s) transport_substep(v, u, h, scratch);
    }
    ScalarField out = implicit_diffusion(ScalarField(dom, std::move(v), rho.time_index()), nu, dt);

    // The exact discrete solution is nonnegative for nonnegative input;
    // the FFT round trip can leave rounding-level negatives.
    if (rho.min() >= 0.0) {
        const double floor = -1e-11 * std::max(1.0, out.max());
        for (double& x : out.values()) {
            if (x < 0.0) {
                if (x < floor) throw std::logic_error("step_fp produced a negative density beyond rounding");
                x = 0.0;
            }
        }
    }
    const double mass_out = out.mass();
    if (mass_out != 0.0 && mass_in != 0.0) out *= mass_in / mass_out;
    out.set_time_index(rho.time_index() + 1);
    return out;
}

FpTrajectory solve_fp(const ScalarField& rho0, const VectorTrajectory& u, const FpOptions& options) {
    check_inputs(rho0, u);
    const DomainSpec& dom = rho0.domain();
    FpTrajectory traj;
    traj.initial = rho0;
    traj.control = u;
    traj.slices.reserve(dom.time_steps + 1);
    ScalarField cur = rho0;
    cur.set_time_index(0);
    traj.slices.push_back(cur);
    record(traj.diagnostics, cur);
    const double D = HeatKernelSpec{dom.nu, options.convention}.diffusivity();
    for (int k = 0; k < dom.time_steps; ++k) {
        long used = 0;
        cur = step_fp(cur, u[k], dom.dt(), D, options.max_substeps, &used);
        traj.diagnostics.substeps += used;
        traj.slices.push_back(cur);
        record(traj.diagnostics, cur);
    }
    return traj;
}

FpTrajectory solve_fp_mild(const ScalarField& rho0, const VectorTrajectory& u, const FpOptions& options) {
    check_inputs(rho0, u);
    const DomainSpec& dom = rho0.domain();
    const HeatKernelSpec kernel{dom.nu, options.convention};
    auto sp = spectral_for(dom);
    const std::size_t M = sp->modes();
    const int NT = dom.time_steps;
    const double h = dom.dt();

    std::vector<EtdWeights> w(M);
    for (std::size_t m = 0; m < M; ++m) w[m] = etd_weights(kernel.diffusivity() * sp->k_squared()[m], h);

    FpTrajectory traj;
    traj.initial = rho0;
    traj.control = u;
    traj.slices = make_scalar_trajectory(dom);
    traj.slices[0] = rho0;
    traj.slices[0].set_time_index(0);

    // Source transform f_k = -div(u_k rho_k) in Fourier space.
    auto source_hat = [&](int k, std::vector<Complex>& out) {
        out.assign(M, Complex(0.0, 0.0));
        std::vector<Complex> tmp;
        std::vector<double> flux(dom.cells());
        for (int a = 0; a < dom.dim; ++a) {
            const auto& ua = u[k].component(a);
            for (std::size_t i = 0; i < flux.size(); ++i) flux[i] = ua[i] * traj.slices[k][i];
            sp->forward(flux, tmp);
            const auto& kk = sp->wavenumber(a);
            for (std::size_t m = 0; m < M; ++m) out[m] -= Complex(0.0, kk[m]) * tmp[m];
        }
    };

    int k0 = 0;
    int slab = NT;
    int total_iterations = 0;
    double last_increment = 0.0;
    int slabs = 0;
    while (k0 < NT) {
        const int k1 = std::min(NT, k0 + slab);
        std::vector<Complex> y0;
        sp->forward(traj.slices[k0].span(), y0);

        // Initial iterate: heat flow from the slab's first layer.
        std::vector<std::vector<Complex>> f(k1 - k0 + 1, std::vector<Complex>(M, Complex(0.0, 0.0)));
        bool converged = false;
        double prev_increment = kInfinity;
        int growth = 0;
        ScalarTrajectory backup(traj.slices.begin() + k0, traj.slices.begin() + k1 + 1);
        for (int it = 1; it <= options.max_picard; ++it) {
            std::vector<Complex> y = y0;
            double increment = 0.0;
            for (int k = k0 + 1; k <= k1; ++k) {
                const auto& fn = f[k - k0];
                const auto& fp = f[k - k0 - 1];
                for (std::size_t m = 0; m < M; ++m) y[m] = w[m].decay * y[m] + w[m].w_now * fn[m] + w[m].w_prev * fp[m];
                ScalarField next(dom, 0.0, k);
                sp->inverse(y, next.values());
                const double step_weight = (k == k1) ? 0.5 : 1.0;
                increment += step_weight * h * l1_distance(next, traj.slices[k]);
                traj.slices[k] = std::move(next);
            }
            ++total_iterations;
            last_increment = increment;
            if (it > 1 && increment < options.picard_tol) {
                converged = true;
                break;
            }
            if (!std::isfinite(increment) || (it > 2 && increment > prev_increment && ++growth > 3)) break;
            prev_increment = increment;
            // u = 0 gives a zero source: the heat iterate is already exact.
            bool zero_source = true;
            for (int k = k0; k <= k1; ++k) {
                source_hat(k, f[k - k0]);
                for (const auto& c : f[k - k0])
                    if (c != Complex(0.0, 0.0)) zero_source = false;
            }
            if (zero_source) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            if (slab == 1) throw std::runtime_error("Duhamel iteration stalled");
            std::copy(backup.begin(), backup.end(), traj.slices.begin() + k0);
            slab /= 2;
            continue;
        }
        ++slabs;
        k0 = k1;
    }

    for (const auto& s : traj.slices) record(traj.diagnostics, s);
    traj.diagnostics.picard_iterations = total_iterations;
    traj.diagnostics.picard_residual = last_increment;
    traj.diagnostics.slabs = slabs;
    return traj;
}

ScalarField regularize_initial(const ScalarField& rho0, double n) {
    if (!(n > 0.0)) throw std::invalid_argument("regularization index must be positive");
    ScalarField out = rho0;
    for (double& v : out.values()) v = v / (1.0 + v / n);
    return out;
}

ContractionReport l1_contraction_check(const ScalarField& rho0_a, const ScalarField& rho0_b,
                                       const VectorTrajectory& u, const FpOptions& options) {
    FpTrajectory a = solve_fp(rho0_a, u, options);
    FpTrajectory b = solve_fp(rho0_b, u, options);
    ContractionReport r;
    r.initial_distance = l1_distance(rho0_a, rho0_b);
    double prev = r.initial_distance;
    for (std::size_t k = 0; k < a.slices.size(); ++k) {
        const double dist = l1_distance(a.slices[k], b.slices[k]);
        r.distance.push_back(dist);
        if (dist > r.initial_distance * (1.0 + 1e-10) + 1e-300) r.bounded = false;
        if (dist > prev * (1.0 + 1e-10) + 1e-300) r.nonincreasing = false;
        prev = dist;
    }
    return r;
}

LogDensityReport log_density_check(const FpTrajectory& traj, const ScalarField& weight) {
    LogDensityReport r;
    const DomainSpec& dom = weight.domain();
    const double vol = dom.cell_volume();
    auto integral = [&](const ScalarField& rho, bool& finite) {
        double s = 0.0;
        for (std::size_t i = 0; i < rho.size(); ++i) {
            if (weight[i] == 0.0) continue;
            if (!(rho[i] > 0.0)) {
                finite = false;
                return kInfinity;
            }
            s += weight[i] * std::abs(std::log(rho[i]));
        }
        return s * vol;
    };
    bool init_finite = true;
    r.initial_term = integral(traj.initial, init_finite);
    r.zero_cell = !init_finite;
    for (const auto& s : traj.slices) {
        bool fin = true;
        const double v = integral(s, fin);
        if (!fin) r.finite = false;
        r.profile.push_back(v);
        r.max = std::max(r.max, v);
    }
    double umax = 0.0;
    for (const auto& u : traj.control) umax = std::max(umax, max_abs_component(u));
    const double denom = umax * (lp_norm(weight, 1.0) + lp_norm(gradient(weight), 1.0));
    r.measured_c1 = (denom > 0.0 && r.finite && !r.zero_cell) ? std::max(0.0, r.max - r.initial_term) / denom : 0.0;
    return r;
}

DecayReport measure_decay(const FpTrajectory& traj, double m, double t_min, double diffusivity) {
    DecayReport r;
    const DomainSpec& dom = traj.initial.domain();
    const double expo = 0.5 * dom.dim * (1.0 - 1.0 / m);
    for (std::size_t k = 1; k < traj.slices.size(); ++k) {
        const double t = k * dom.dt();
        if (t < t_min - 1e-12) continue;
        r.times.push_back(t);
        r.scaled.push_back(lp_norm(traj.slices[k], m) * std::pow(t, expo));
        r.constant = std::max(r.constant, r.scaled.back());
    }
    // |E(t)|_m t^{expo} for the Gaussian kernel, independent of t.
    r.heat_constant = std::pow(4.0 * std::numbers::pi * diffusivity, -expo) * std::pow(m, -0.5 * dom.dim / m);
    return r;
}

}  // namespace mfg
