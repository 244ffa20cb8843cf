#include "mfg/coupler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfg {

namespace {

// Trapezoid weights over the N_T + 1 slices.
double time_weight(std::size_t k, std::size_t n, double dt) { return (k == 0 || k + 1 == n) ? 0.5 * dt : dt; }

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::span<const double> head(const std::array<double, 2>& v, int d) { return {v.data(), static_cast<std::size_t>(d)}; }

bool differentiable(const ConvexIntegrand& g) {
    auto graph = g.subdifferential_graph();
    return graph && graph->single_valued();
}

double scalar_eta(const ConvexIntegrand& g, double eps, double r) {
    if (eps > 0.0) return yosida_grad(g, eps, r);
    return subdiff_select(g, std::span<const double>(&r, 1)).value[0];
}

// Mild-equation residual |z - Gamma(z) - w|_{L1(Q_T)} in the time-reversed frame.
double hjb_mild_residual(const HjbTrajectory& p, const ConvexIntegrand& H, const HeatKernelSpec& kernel) {
    ScalarTrajectory h = time_reverse(p.source);
    for (auto& s : h) s *= -1.0;
    ScalarField p0 = p.terminal;
    p0 *= -1.0;
    p0.set_time_index(0);
    VectorTrajectory z = time_reverse(p.grad_p);
    VectorTrajectory g = gamma_apply(z, H, kernel);
    VectorTrajectory w = assemble_w(p0, h, kernel);
    for (std::size_t k = 0; k < g.size(); ++k) {
        g[k] += w[k];
        g[k] -= z[k];
    }
    return l1_space_time(g);
}

double fenchel_gap_of(const VectorTrajectory& u, const VectorTrajectory& grad_p, const ScalarTrajectory& rho,
                      const ConvexIntegrand& L, const ConvexIntegrand& H, double floor) {
    const DomainSpec& dom = rho.front().domain();
    const int d = dom.dim;
    double total = 0.0;
    for (std::size_t k = 0; k < rho.size(); ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < dom.cells(); ++i) {
            if (!(rho[k][i] > floor)) continue;
            const auto uv = u[k].at(i);
            const auto q = grad_p[k].at(i);
            const double gap = H.value(head(q, d)) + L.value(head(uv, d)) - dot(head(uv, d), head(q, d));
            s += std::max(0.0, gap);
        }
        total += time_weight(k, rho.size(), dom.dt()) * s * dom.cell_volume();
    }
    return total;
}

double coupling_gap_of(const ScalarTrajectory& rho, const ScalarTrajectory& eta, const ScalarField& eta0,
                       const ConvexIntegrand& g, const ConvexIntegrand& g0) {
    const DomainSpec& dom = rho.front().domain();
    double total = 0.0;
    for (std::size_t k = 0; k < rho.size(); ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < dom.cells(); ++i) s += fenchel_residual(g, rho[k][i], eta[k][i]);
        total += time_weight(k, rho.size(), dom.dt()) * s * dom.cell_volume();
    }
    double term = 0.0;
    for (std::size_t i = 0; i < dom.cells(); ++i) term += fenchel_residual(g0, rho.back()[i], eta0[i]);
    return total + term * dom.cell_volume();
}

double max_abs_difference(const ScalarTrajectory& a, const ScalarTrajectory& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t i = 0; i < a[k].size(); ++i) m = std::max(m, std::abs(a[k][i] - b[k][i]));
    return m;
}

void check_problem(const MfgProblem& pr) {
    if (!pr.lagrangian || !pr.hamiltonian || !pr.g || !pr.g0) throw std::invalid_argument("MFG problem is missing an integrand");
    pr.domain.validate();
    if (!pr.rho0.domain().same_space(pr.domain)) throw std::invalid_argument("initial density lives on a different lattice");
    if (!(pr.rho0.min() > 0.0))
        throw std::invalid_argument("initial density must be positive everywhere (log rho0 locally integrable)");
    if (!std::isfinite(pr.hamiltonian->lipschitz_constant()))
        throw std::invalid_argument("Hamiltonian must be Lipschitz (bounded control set)");
}

}  // namespace

void EpsSchedule::validate() const {
    if (ladder.empty()) throw std::invalid_argument("eps ladder is empty");
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (!(ladder[i] > 0.0)) throw std::invalid_argument("eps ladder entries must be positive");
        if (i > 0 && !(ladder[i] < ladder[i - 1])) throw std::invalid_argument("eps ladder must be strictly decreasing");
    }
    if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("damping must lie in (0, 1]");
    if (!(theta_decay > 0.0 && theta_decay < 1.0)) throw std::invalid_argument("damping decay must lie in (0, 1)");
    if (max_per_level < 1) throw std::invalid_argument("max iterations per level must be positive");
}

double ResidualReport::triple() const { return std::max({fp, hjb, fenchel_gap}); }
double ResidualReport::max() const { return std::max(triple(), coupling_gap); }

double density_floor(const ScalarField& rho0) { return 1e-12 * rho0.mass() / rho0.domain().measure(); }

double cost_J(const VectorTrajectory& u, const ScalarTrajectory& rho, const ConvexIntegrand& L,
              const ConvexIntegrand& g, const ConvexIntegrand& g0) {
    if (rho.empty() || u.size() != rho.size()) throw std::invalid_argument("cost_J needs matching u and rho trajectories");
    const DomainSpec& dom = rho.front().domain();
    const int d = dom.dim;
    const double floor = density_floor(rho.front());
    double total = 0.0;
    for (std::size_t k = 0; k < rho.size(); ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < dom.cells(); ++i) {
            const double r = rho[k][i];
            const auto uv = u[k].at(i);
            const double l = L.value(head(uv, d));
            if (!std::isfinite(l)) {
                if (r > floor) throw std::domain_error("infeasible control: L(u) = +inf where the density is positive");
            } else {
                s += l * r;
            }
            s += g.value(r);
        }
        total += time_weight(k, rho.size(), dom.dt()) * s * dom.cell_volume();
    }
    double term = 0.0;
    for (std::size_t i = 0; i < dom.cells(); ++i) term += g0.value(rho.back()[i]);
    return total + term * dom.cell_volume();
}

double penalized_cost(const VectorTrajectory& u, const ScalarTrajectory& rho, const VectorTrajectory& u_ref,
                      const ScalarField& phi, double eps, const ConvexIntegrand& L, const ConvexIntegrand& g,
                      const ConvexIntegrand& g0) {
    if (!(eps > 0.0)) throw std::invalid_argument("penalized_cost requires eps > 0");
    if (u_ref.size() != u.size()) throw std::invalid_argument("reference control has the wrong length");
    const DomainSpec& dom = rho.front().domain();
    const int d = dom.dim;
    double total = 0.0;
    for (std::size_t k = 0; k < rho.size(); ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < dom.cells(); ++i) {
            const double r = rho[k][i];
            const auto uv = u[k].at(i);
            const auto ur = u_ref[k].at(i);
            const double l = L.value(head(uv, d));
            if (r > 0.0) {
                if (!std::isfinite(l)) throw std::domain_error("infeasible control: L(u) = +inf where the density is positive");
                double dev = 0.0;
                for (int a = 0; a < d; ++a) dev += (uv[a] - ur[a]) * (uv[a] - ur[a]);
                s += l * r + 0.5 * phi[i] * r * dev;
            }
            s += yosida_value(g, eps, r);
        }
        total += time_weight(k, rho.size(), dom.dt()) * s * dom.cell_volume();
    }
    double term = 0.0;
    for (std::size_t i = 0; i < dom.cells(); ++i) term += yosida_value(g0, eps, rho.back()[i]);
    return total + term * dom.cell_volume();
}

VectorTrajectory best_response(const VectorTrajectory& grad_p, const ConvexIntegrand& H, double gradient_tolerance) {
    VectorTrajectory out;
    out.reserve(grad_p.size());
    for (const auto& q : grad_p) {
        const DomainSpec& dom = q.domain();
        const int d = dom.dim;
        VectorField u(dom, 0.0, q.time_index());
        for (std::size_t i = 0; i < dom.cells(); ++i) {
            auto v = q.at(i);
            double norm = 0.0;
            for (int a = 0; a < d; ++a) norm += v[a] * v[a];
            if (std::sqrt(norm) < gradient_tolerance) v = {0.0, 0.0};
            const SubgradientSelection s = subdiff_select(H, head(v, d));
            u.set(i, s.value);
        }
        out.push_back(std::move(u));
    }
    return out;
}

ScalarTrajectory coupling_eta(const ScalarTrajectory& rho, const ConvexIntegrand& g, double eps) {
    if (eps < 0.0) throw std::invalid_argument("coupling level must be nonnegative");
    ScalarTrajectory out;
    out.reserve(rho.size());
    for (const auto& r : rho) out.push_back(terminal_eta0(r, g, eps));
    return out;
}

ScalarField terminal_eta0(const ScalarField& rho_T, const ConvexIntegrand& g0, double eps) {
    if (eps < 0.0) throw std::invalid_argument("coupling level must be nonnegative");
    ScalarField out(rho_T.domain(), 0.0, rho_T.time_index());
    for (std::size_t i = 0; i < rho_T.size(); ++i) out[i] = scalar_eta(g0, eps, rho_T[i]);
    return out;
}

ResidualReport optimality_residual(const MfgState& state, const MfgProblem& problem, const MfgOptions& options) {
    ResidualReport r;
    const HeatKernelSpec kernel{problem.domain.nu, problem.convention};
    FpOptions fo = options.fp;
    fo.convention = problem.convention;
    const FpTrajectory again = solve_fp(problem.rho0, state.u, fo);
    r.fp = l1_space_time_distance(state.rho.slices, again.slices);
    r.hjb = hjb_mild_residual(state.p, *problem.hamiltonian, kernel);
    r.fenchel_gap = fenchel_gap_of(state.u, state.p.grad_p, state.rho.slices, *problem.lagrangian,
                                   *problem.hamiltonian, density_floor(problem.rho0));
    r.coupling_gap = coupling_gap_of(state.rho.slices, state.eta, state.eta0, *problem.g, *problem.g0);
    return r;
}

VectorTrajectory constant_control(const DomainSpec& domain, std::array<double, 2> c) {
    VectorTrajectory u = make_vector_trajectory(domain);
    for (auto& f : u)
        for (std::size_t i = 0; i < f.size(); ++i) f.set(i, head(c, domain.dim));
    return u;
}

MfgState solve_mfg(const MfgProblem& problem, const MfgOptions& options, const std::optional<VectorTrajectory>& initial_u) {
    check_problem(problem);
    options.schedule.validate();
    const EpsSchedule& sched = options.schedule;
    const ConvexIntegrand& H = *problem.hamiltonian;
    const ConvexIntegrand& L = *problem.lagrangian;
    const HeatKernelSpec kernel{problem.domain.nu, problem.convention};
    const double floor = density_floor(problem.rho0);

    std::vector<double> levels = sched.ladder;
    if (sched.exact_final_level && differentiable(*problem.g) && differentiable(*problem.g0)) levels.push_back(0.0);

    FpOptions fo = options.fp;
    fo.convention = problem.convention;
    HjbOptions ho = options.hjb;
    ho.convention = problem.convention;

    VectorTrajectory u = initial_u ? *initial_u : make_vector_trajectory(problem.domain);
    if (u.size() != static_cast<std::size_t>(problem.domain.time_steps) + 1)
        throw std::invalid_argument("initial control must have N_T + 1 slices");

    MfgState state;
    int total = 0;
    int failed_levels = 0;
    bool have_state = false;

    // One forward-backward sweep from the current control at level eps.
    struct Sweep {
        FpTrajectory rho;
        ScalarTrajectory eta;
        ScalarField eta0;
        HjbTrajectory p;
        VectorTrajectory u_new;
        ResidualReport res;
        double cost = 0;
    };
    auto sweep = [&](const VectorTrajectory& uk, double eps, const FpTrajectory* reuse_rho) {
        Sweep s;
        s.rho = reuse_rho ? *reuse_rho : solve_fp(problem.rho0, uk, fo);
        s.eta = coupling_eta(s.rho.slices, *problem.g, eps);
        s.eta0 = terminal_eta0(s.rho.slices.back(), *problem.g0, eps);
        s.p = solve_hjb(s.eta, s.eta0, H, ho);
        if (!(ho.slab_T > 0.0)) {
            // The first solve fixes the slab length; later sweeps reuse it.
            ho.slab_T = s.p.diagnostics.slab_T;
            ho.ratio_pairs = 0;
        }
        s.u_new = best_response(s.p.grad_p, H, options.gradient_tolerance);
        const FpTrajectory next = solve_fp(problem.rho0, s.u_new, fo);
        s.res.fp = l1_space_time_distance(s.rho.slices, next.slices);
        s.res.hjb = hjb_mild_residual(s.p, H, kernel);
        s.res.fenchel_gap = fenchel_gap_of(s.u_new, s.p.grad_p, s.rho.slices, L, H, floor);
        s.res.coupling_gap = coupling_gap_of(s.rho.slices, s.eta, s.eta0, *problem.g, *problem.g0);
        s.cost = cost_J(uk, s.rho.slices, L, *problem.g, *problem.g0);
        return s;
    };
    auto adopt = [&](Sweep& s, double eps) {
        state.rho = std::move(s.rho);
        state.rho.control = s.u_new;
        state.p = std::move(s.p);
        state.u = std::move(s.u_new);
        state.eta = std::move(s.eta);
        state.eta0 = std::move(s.eta0);
        state.residuals = s.res;
        state.fenchel_gap = s.res.fenchel_gap;
        state.eps = eps;
        have_state = true;
    };

    for (std::size_t lv = 0; lv < levels.size() && total < options.max_outer; ++lv) {
        const double eps = levels[lv];
        const bool last = lv + 1 == levels.size();
        const double level_tol = last ? options.tol : std::max(options.tol, sched.level_tol);

        // A converged state whose couplings do not move with eps is already
        // converged at this level.
        if (have_state && state.residuals.triple() < level_tol) {
            const ScalarTrajectory eta = coupling_eta(state.rho.slices, *problem.g, eps);
            const ScalarField eta0 = terminal_eta0(state.rho.slices.back(), *problem.g0, eps);
            if (max_abs_difference(eta, state.eta) == 0.0 && max_abs_difference({eta0}, {state.eta0}) == 0.0) {
                state.eps = eps;
                state.residuals.coupling_gap = coupling_gap_of(state.rho.slices, eta, eta0, *problem.g, *problem.g0);
                if (last) state.converged = true;
                continue;
            }
        }

        double theta = sched.theta;
        double prev = kInfinity;
        bool reached = false;
        for (int it = 1; it <= sched.max_per_level && total < options.max_outer; ++it) {
            Sweep s = sweep(u, eps, nullptr);
            ++total;
            const double r = s.res.triple();
            state.history.push_back({static_cast<int>(lv), eps, it, theta, s.cost, s.res});
            if (r > prev) theta = std::max(sched.theta_min, theta * sched.theta_decay);
            prev = r;
            if (r < level_tol) {
                adopt(s, eps);
                reached = true;
                break;
            }
            for (std::size_t k = 0; k < u.size(); ++k) {
                u[k] *= 1.0 - theta;
                VectorField step = s.u_new[k];
                step *= theta;
                u[k] += step;
            }
            if (it == sched.max_per_level || total == options.max_outer) adopt(s, eps);
        }
        if (reached) {
            failed_levels = 0;
            if (last) state.converged = true;
        } else if (++failed_levels >= 3) {
            state.status = "non-convergence: residual stagnated across 3 eps levels";
            break;
        }
        // Warm start the next level from the accepted control.
        if (have_state) u = state.u;
    }

    state.outer_iterations = total;
    if (!have_state) throw std::runtime_error("solve_mfg performed no iterations");
    state.cost = cost_J(state.u, state.rho.slices, L, *problem.g, *problem.g0);
    if (state.status.empty())
        state.status = state.converged ? "converged" : "non-convergence: iteration budget exhausted";
    return state;
}

UniquenessReport uniqueness_probe(const MfgProblem& problem, const MfgOptions& options, const VectorTrajectory& init_a,
                                  const VectorTrajectory& init_b) {
    UniquenessReport rep;
    // Strict convexity of g plus a finite growth exponent for g0 (any finite
    // power is dominated by some admissible conjugate exponent).
    const bool growth_ok = problem.g0->growth_exponent().has_value();
    rep.guaranteed = problem.g->strictly_convex() && growth_ok;
    if (!rep.guaranteed) rep.note = "uniqueness not guaranteed";
    const MfgState a = solve_mfg(problem, options, init_a);
    const MfgState b = solve_mfg(problem, options, init_b);
    rep.converged_a = a.converged;
    rep.converged_b = b.converged;
    rep.rho_distance = l1_space_time_distance(a.rho.slices, b.rho.slices);
    rep.p_distance = l1_space_time_distance(a.p.p, b.p.p);
    return rep;
}

}  // namespace mfg
