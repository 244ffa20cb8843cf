#include "mfg/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace mfg {

namespace {

using SpectralTrajectory = std::vector<std::vector<Complex>>;

DomainSpec slab_domain(const DomainSpec& dom, int steps) {
    DomainSpec s = dom;
    s.time_steps = steps;
    s.horizon = steps * dom.dt();
    return s;
}

// The domain carried by a trajectory's slices, with its time grid matched to
// the number of slices (slab trajectories are shorter than the horizon).
DomainSpec trajectory_domain(const DomainSpec& slice_domain, std::size_t slices) {
    return slab_domain(slice_domain, static_cast<int>(slices) - 1);
}

ScalarField hamiltonian_slice(const VectorField& z, const ConvexIntegrand& H, const VectorField* shift) {
    const DomainSpec& dom = z.domain();
    ScalarField out(dom, 0.0, z.time_index());
    double q[2] = {0.0, 0.0};
    std::span<const double> qs(q, static_cast<std::size_t>(dom.dim));
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (int a = 0; a < dom.dim; ++a) {
            q[a] = z.component(a)[i];
            if (shift) q[a] += shift->component(a)[i];
        }
        out[i] = H.value(qs);
    }
    return out;
}

struct Integrator {
    DomainSpec dom;
    std::shared_ptr<const Spectral> sp;
    std::vector<EtdWeights> w;
    double h;

    Integrator(const DomainSpec& d, const HeatKernelSpec& kernel) : dom(d), sp(spectral_for(d)), h(d.dt()) {
        w.resize(sp->modes());
        for (std::size_t m = 0; m < w.size(); ++m) w[m] = etd_weights(kernel.diffusivity() * sp->k_squared()[m], h);
    }

    std::vector<Complex> transform(const ScalarField& f) const {
        std::vector<Complex> out;
        sp->forward(f.span(), out);
        return out;
    }

    // y_n for n = 0..F.size()-1 from y_0 and per-step source transforms.
    SpectralTrajectory march(const std::vector<Complex>& y0, const SpectralTrajectory& F) const {
        SpectralTrajectory y(F.size());
        y[0] = y0;
        for (std::size_t n = 1; n < F.size(); ++n) {
            y[n].resize(y0.size());
            for (std::size_t m = 0; m < y0.size(); ++m)
                y[n][m] = w[m].decay * y[n - 1][m] + w[m].w_now * F[n][m] + w[m].w_prev * F[n - 1][m];
        }
        return y;
    }

    VectorField gradient_of(const std::vector<Complex>& y, int k) const {
        VectorField g(dom, 0.0, k);
        std::vector<Complex> d(y.size());
        for (int a = 0; a < dom.dim; ++a) {
            const auto& kk = sp->wavenumber(a);
            for (std::size_t m = 0; m < y.size(); ++m) d[m] = Complex(0.0, kk[m]) * y[m];
            sp->inverse(d, g.component(a));
        }
        return g;
    }

    ScalarField value_of(const std::vector<Complex>& y, int k) const {
        ScalarField f(dom, 0.0, k);
        sp->inverse(y, f.values());
        return f;
    }
};

SpectralTrajectory hamiltonian_transforms(const Integrator& I, const VectorTrajectory& z, const ConvexIntegrand& H,
                                          const VectorTrajectory* shift, const ScalarTrajectory* extra) {
    SpectralTrajectory F(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) {
        ScalarField hk = hamiltonian_slice(z[k], H, shift ? &(*shift)[k] : nullptr);
        if (extra) hk += (*extra)[k];
        F[k] = I.transform(hk);
    }
    return F;
}

// Smooth random field: a few low Fourier modes per axis with random phases,
// modulated smoothly in time.
VectorTrajectory smooth_perturbation(const VectorTrajectory& like, double amplitude, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::uniform_int_distribution<int> M(1, 4);
    const DomainSpec& dom = like.front().domain();
    const double base = std::numbers::pi / dom.half_width;
    VectorTrajectory out = like;
    const int terms = 3;
    for (int a = 0; a < dom.dim; ++a) {
        double c[terms], phase[terms], mx[terms], my[terms], tw[terms];
        for (int j = 0; j < terms; ++j) {
            c[j] = U(rng);
            phase[j] = std::numbers::pi * U(rng);
            mx[j] = M(rng);
            my[j] = dom.dim == 2 ? M(rng) : 0;
            tw[j] = U(rng);
        }
        const double T = std::max(1, static_cast<int>(like.size()) - 1) * dom.dt();
        for (std::size_t k = 0; k < like.size(); ++k) {
            const double t = k * dom.dt();
            auto& comp = out[k].component(a);
            for (std::size_t i = 0; i < comp.size(); ++i) {
                auto x = dom.position(i);
                double s = 0.0;
                for (int j = 0; j < terms; ++j)
                    s += c[j] * std::cos(base * (mx[j] * x[0] + my[j] * x[1]) + phase[j]) *
                         (1.0 + 0.5 * tw[j] * std::sin(std::numbers::pi * t / T));
                comp[i] = amplitude * s;
            }
        }
    }
    return out;
}

double sup_norm(const VectorTrajectory& z) {
    double m = 0.0;
    for (const auto& v : z) m = std::max(m, v.sup_norm());
    return m;
}

}  // namespace

ScalarTrajectory time_reverse(const ScalarTrajectory& f) {
    ScalarTrajectory r(f.rbegin(), f.rend());
    for (std::size_t k = 0; k < r.size(); ++k) r[k].set_time_index(static_cast<int>(k));
    return r;
}

VectorTrajectory time_reverse(const VectorTrajectory& f) {
    VectorTrajectory r(f.rbegin(), f.rend());
    for (std::size_t k = 0; k < r.size(); ++k) r[k].set_time_index(static_cast<int>(k));
    return r;
}

VectorTrajectory gamma_apply(const VectorTrajectory& z, const ConvexIntegrand& H, const HeatKernelSpec& kernel,
                             const VectorTrajectory* shift) {
    if (z.empty()) return {};
    const DomainSpec dom = trajectory_domain(z.front().domain(), z.size());
    Integrator I(dom, kernel);
    SpectralTrajectory F = hamiltonian_transforms(I, z, H, shift, nullptr);
    SpectralTrajectory y = I.march(std::vector<Complex>(I.sp->modes(), Complex(0.0, 0.0)), F);
    VectorTrajectory out;
    out.reserve(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) out.push_back(I.gradient_of(y[k], z[k].time_index()));
    return out;
}

VectorTrajectory assemble_w(const ScalarField& initial, const ScalarTrajectory& source, const HeatKernelSpec& kernel) {
    if (source.empty()) throw std::invalid_argument("assemble_w needs at least one source slice");
    const DomainSpec dom = trajectory_domain(initial.domain(), source.size());
    Integrator I(dom, kernel);
    SpectralTrajectory F(source.size());
    for (std::size_t k = 0; k < source.size(); ++k) F[k] = I.transform(source[k]);
    SpectralTrajectory y = I.march(I.transform(initial), F);
    VectorTrajectory out;
    out.reserve(source.size());
    for (std::size_t k = 0; k < source.size(); ++k) out.push_back(I.gradient_of(y[k], static_cast<int>(k)));
    return out;
}

FixedPointResult solve_grad_fixed_point(const VectorTrajectory& w, const ConvexIntegrand& H,
                                        const HeatKernelSpec& kernel, double tol, int max_iterations,
                                        const VectorTrajectory* shift) {
    FixedPointResult r;
    r.z = w;
    for (int it = 1; it <= max_iterations; ++it) {
        VectorTrajectory next = gamma_apply(r.z, H, kernel, shift);
        for (std::size_t k = 0; k < next.size(); ++k) next[k] += w[k];
        const double inc = l1_space_time_distance(next, r.z);
        r.z = std::move(next);
        r.iterations = it;
        r.history.push_back(inc);
        if (!std::isfinite(inc) || inc > 1e100) break;
        if (inc < tol) {
            r.converged = true;
            break;
        }
    }
    VectorTrajectory g = gamma_apply(r.z, H, kernel, shift);
    for (std::size_t k = 0; k < g.size(); ++k) {
        g[k] += w[k];
        g[k] -= r.z[k];
    }
    r.residual = l1_space_time(g);
    return r;
}

double measure_contraction_ratio(const VectorTrajectory& base, const ConvexIntegrand& H,
                                 const HeatKernelSpec& kernel, int pairs, std::uint64_t seed) {
    if (base.size() < 2) return 0.0;
    std::mt19937_64 rng(seed);
    const double amplitude = 0.5 * (1.0 + sup_norm(base));
    double worst = 0.0;
    for (int p = 0; p < pairs; ++p) {
        VectorTrajectory a = smooth_perturbation(base, amplitude, rng);
        VectorTrajectory b = smooth_perturbation(base, amplitude, rng);
        for (std::size_t k = 0; k < base.size(); ++k) {
            a[k] += base[k];
            b[k] += base[k];
        }
        const double den = l1_space_time_distance(a, b);
        if (!(den > 0.0)) continue;
        const double num = l1_space_time_distance(gamma_apply(a, H, kernel), gamma_apply(b, H, kernel));
        worst = std::max(worst, num / den);
    }
    return worst;
}

HjbTrajectory solve_hjb(const ScalarTrajectory& eta, const ScalarField& eta0, const ConvexIntegrand& H,
                        const HjbOptions& options) {
    const DomainSpec& dom = eta0.domain();
    const int NT = dom.time_steps;
    if (eta.size() != static_cast<std::size_t>(NT) + 1) throw std::invalid_argument("source must have N_T + 1 slices");
    const HeatKernelSpec kernel{dom.nu, options.convention};
    const double dt = dom.dt();

    HjbTrajectory out;
    out.source = eta;
    out.terminal = eta0;
    HjbDiagnostics& diag = out.diagnostics;

    // Time-reversed data: p~(0) = -eta0, h(s) = -eta(T - s).
    ScalarTrajectory h = time_reverse(eta);
    for (auto& s : h) s *= -1.0;
    ScalarField p0 = eta0;
    p0 *= -1.0;
    p0.set_time_index(0);

    double slab_T = options.slab_T;
    if (!(slab_T > 0.0)) {
        VectorTrajectory w_full = assemble_w(p0, h, kernel);
        const int pairs = std::max(1, options.ratio_pairs);
        const double ratio = measure_contraction_ratio(w_full, H, kernel, pairs, options.seed);
        diag.c_hat = ratio / std::sqrt(dom.horizon);
        slab_T = diag.c_hat > 0.0 ? std::min(dom.horizon, 1.0 / (4.0 * diag.c_hat * diag.c_hat)) : dom.horizon;
    }
    int steps = std::max(1, static_cast<int>(std::floor(slab_T / dt + 1e-9)));
    steps = std::min(steps, NT);

    ScalarTrajectory pt(NT + 1);
    VectorTrajectory zt(NT + 1);
    pt[0] = p0;

    int n0 = 0;
    int halvings = 0;
    while (n0 < NT) {
        const int n1 = std::min(NT, n0 + steps);
        const DomainSpec sdom = slab_domain(dom, n1 - n0);
        ScalarTrajectory hs(h.begin() + n0, h.begin() + n1 + 1);
        VectorTrajectory w = assemble_w(pt[n0], hs, kernel);

        SlabReport rep;
        rep.first_step = n0;
        rep.last_step = n1;
        rep.length = sdom.horizon;
        if (options.ratio_pairs > 0) {
            rep.ratio = measure_contraction_ratio(w, H, kernel, options.ratio_pairs,
                                                  options.seed + static_cast<std::uint64_t>(n0));
        }
        FixedPointResult fp;
        bool accepted = rep.ratio < 1.0;
        if (accepted) {
            fp = solve_grad_fixed_point(w, H, kernel, options.tol, options.max_iterations);
            accepted = fp.converged;
        }
        if (!accepted) {
            if (steps == 1 || halvings >= options.max_halvings)
                throw std::runtime_error("HJB fixed point does not contract after " + std::to_string(halvings) +
                                         " slab halvings: the Hamiltonian is not Lipschitz enough");
            steps = std::max(1, steps / 2);
            ++halvings;
            continue;
        }
        rep.iterations = fp.iterations;
        rep.residual = fp.residual;
        diag.residual_history.insert(diag.residual_history.end(), fp.history.begin(), fp.history.end());
        diag.max_ratio = std::max(diag.max_ratio, rep.ratio);
        diag.fixed_point_residual = std::max(diag.fixed_point_residual, fp.residual);
        diag.slabs.push_back(rep);

        // Reconstruct p~ on the slab from the mild formula.
        Integrator I(sdom, kernel);
        SpectralTrajectory F = hamiltonian_transforms(I, fp.z, H, nullptr, &hs);
        SpectralTrajectory y = I.march(I.transform(pt[n0]), F);
        for (int n = n0; n <= n1; ++n) {
            if (n > n0) pt[n] = I.value_of(y[n - n0], n);
            if (n > n0 || n0 == 0) {
                zt[n] = fp.z[n - n0];
                zt[n].set_time_index(n);
            }
        }
        n0 = n1;
    }
    diag.slab_T = steps * dt;
    diag.halvings = halvings;

    out.p = time_reverse(pt);
    out.grad_p = time_reverse(zt);
    for (auto& s : out.p) s = ScalarField(dom, std::move(s.values()), s.time_index());
    for (std::size_t k = 0; k < out.grad_p.size(); ++k) {
        VectorField v(dom, 0.0, static_cast<int>(k));
        for (int a = 0; a < dom.dim; ++a) v.component(a) = out.grad_p[k].component(a);
        out.grad_p[k] = std::move(v);
    }
    return out;
}

namespace {

// Godunov selection for a radially nondecreasing H in the reversed-time
// frame: a = backward difference, b = forward difference.
inline double godunov_component(double a, double b) {
    if (a <= b) return std::abs(a) >= std::abs(b) ? a : b;
    if (b <= 0.0 && 0.0 <= a) return 0.0;
    return std::abs(a) <= std::abs(b) ? a : b;
}

ScalarField godunov_hamiltonian(const ScalarField& p, const ConvexIntegrand& H, double& max_slope) {
    const DomainSpec& dom = p.domain();
    const double inv = 1.0 / dom.dx();
    ScalarField out(dom, 0.0, p.time_index());
    double q[2] = {0.0, 0.0};
    std::span<const double> qs(q, static_cast<std::size_t>(dom.dim));
    max_slope = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (int a = 0; a < dom.dim; ++a) {
            const double back = (p[i] - p[periodic_neighbor(dom, i, a, -1)]) * inv;
            const double fwd = (p[periodic_neighbor(dom, i, a, 1)] - p[i]) * inv;
            q[a] = godunov_component(back, fwd);
            max_slope = std::max({max_slope, std::abs(back), std::abs(fwd)});
        }
        out[i] = H.value(qs);
    }
    return out;
}

double lipschitz_estimate(const ConvexIntegrand& H, int dim, double slope) {
    const double L = H.lipschitz_constant();
    if (std::isfinite(L)) return L;
    // Convex H: the chord slope beyond the current range bounds H' on it.
    double lo[2] = {slope, 0.0}, hi[2] = {2.0 * slope + 1.0, 0.0};
    std::span<const double> a(lo, static_cast<std::size_t>(dim)), b(hi, static_cast<std::size_t>(dim));
    return std::abs(H.value(b) - H.value(a)) / (slope + 1.0);
}

}  // namespace

HjbTrajectory solve_hjb_fd(const ScalarTrajectory& eta, const ScalarField& eta0, const ConvexIntegrand& H,
                           const HjbOptions& options) {
    const DomainSpec& dom = eta0.domain();
    const int NT = dom.time_steps;
    if (eta.size() != static_cast<std::size_t>(NT) + 1) throw std::invalid_argument("source must have N_T + 1 slices");
    const double D = HeatKernelSpec{dom.nu, options.convention}.diffusivity();
    const double dt = dom.dt();

    HjbTrajectory out;
    out.source = eta;
    out.terminal = eta0;
    out.p.resize(NT + 1);
    out.grad_p.resize(NT + 1);

    ScalarField p = eta0;
    p *= -1.0;
    p.set_time_index(NT);
    out.p[NT] = p;
    for (int k = NT - 1; k >= 0; --k) {
        // Source averaged over the step, matching the linear-in-time mild quadrature.
        ScalarField src = eta[k];
        src += eta[k + 1];
        src *= 0.5;
        double slope = 0.0;
        godunov_hamiltonian(p, H, slope);
        const double lip = lipschitz_estimate(H, dom.dim, slope);
        const long n_sub = std::max(1L, static_cast<long>(std::ceil(dt * lip * dom.dim / (0.9 * dom.dx()))));
        const double hs = dt / n_sub;
        for (long s = 0; s < n_sub; ++s) {
            ScalarField Hp = godunov_hamiltonian(p, H, slope);
            for (std::size_t i = 0; i < p.size(); ++i) p[i] += hs * (Hp[i] - src[i]);
            p = implicit_diffusion(p, D, hs);
        }
        p.set_time_index(k);
        out.p[k] = p;
    }
    for (int k = 0; k <= NT; ++k) out.grad_p[k] = spectral_gradient(out.p[k]);
    return out;
}

}  // namespace mfg
