#include "mfg/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>

#include "mfg/coupler.hpp"
#include "mfg/fokker_planck.hpp"
#include "mfg/hjb.hpp"
#include "mfg/particles.hpp"
#include "mfg/presets.hpp"
#include "mfg/spectral.hpp"

namespace mfg {

namespace {

template <typename... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double dot_self(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

DomainSpec domain_1d(double L, int N, int NT, double T, double nu) {
    DomainSpec d;
    d.dim = 1;
    d.half_width = L;
    d.points = N;
    d.time_steps = NT;
    d.horizon = T;
    d.nu = nu;
    return d;
}

// The coupled reference problem: d = 1, N = 128, N_T = 64, nu = 0.5, T = 0.5.
MfgProblem reference_problem(const std::string& hamiltonian, double a, const std::string& coupling,
                             const Parameters& coupling_params = {}) {
    MfgProblem pr;
    pr.domain = domain_1d(8.0, 128, 64, 0.5, 0.5);
    pr.hamiltonian = make_integrand(hamiltonian, {{"a", a}});
    pr.lagrangian = pr.hamiltonian->conjugate_partner();
    pr.g = make_integrand(coupling, coupling_params);
    pr.g0 = make_integrand(coupling, coupling_params);
    pr.rho0 = gaussian_field(pr.domain, 1.0, 1.0);
    return pr;
}

const Parameters& step_params() {
    static const Parameters p{{"slope", 1.0}, {"jump.1.at", 0.1}, {"jump.1.height", 0.5}};
    return p;
}

ScalarField random_density(const DomainSpec& dom, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> c(-3.0, 3.0), v(0.3, 2.0), m(0.2, 1.0);
    std::uniform_int_distribution<int> count(1, 3);
    ScalarField rho(dom, 0.0);
    const int n = count(rng);
    for (int j = 0; j < n; ++j) {
        const double cx = c(rng), cy = c(rng);
        rho += gaussian_field(dom, v(rng), m(rng), {cx, cy});
    }
    return rho;
}

// Smooth periodic control with |u| <= a everywhere.
VectorTrajectory random_control(const DomainSpec& dom, double a, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi), w(0.0, 1.0);
    std::uniform_int_distribution<int> mode(1, 4);
    struct Term {
        double c, kx, ky, ph, om;
    };
    const double base = std::numbers::pi / dom.half_width;
    std::vector<std::vector<Term>> comps(dom.dim);
    for (int ax = 0; ax < dom.dim; ++ax) {
        double total = 0.0;
        for (int j = 0; j < 3; ++j) {
            Term t{w(rng), base * mode(rng), dom.dim == 2 ? base * mode(rng) : 0.0, phase(rng), 4.0 * w(rng)};
            total += t.c;
            comps[ax].push_back(t);
        }
        const double scale = a / (total * std::sqrt(static_cast<double>(dom.dim)));
        for (auto& t : comps[ax]) t.c *= scale;
    }
    VectorTrajectory u = make_vector_trajectory(dom);
    for (int k = 0; k <= dom.time_steps; ++k) {
        const double t = k * dom.dt();
        for (std::size_t i = 0; i < dom.cells(); ++i) {
            const auto x = dom.position(i);
            std::array<double, 2> val{0.0, 0.0};
            for (int ax = 0; ax < dom.dim; ++ax)
                for (const auto& term : comps[ax]) val[ax] += term.c * std::sin(term.kx * x[0] + term.ky * x[1] + term.ph + term.om * t);
            u[k].set(i, std::span<const double>(val.data(), dom.dim));
        }
    }
    return u;
}

DomainSpec random_domain(std::mt19937_64& rng, int index) {
    std::uniform_real_distribution<double> nu(0.1, 1.0);
    DomainSpec d;
    d.dim = index % 5 == 4 ? 2 : 1;
    d.half_width = 6.0;
    d.points = d.dim == 1 ? 128 : 32;
    d.time_steps = 32;
    d.horizon = 0.5;
    d.nu = nu(rng);
    return d;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CriterionResult pure_diffusion() {
    CriterionResult r;
    const DomainSpec dom = domain_1d(10.0, 256, 256, 1.0, 0.5);
    const ScalarField rho0 = gaussian_field(dom, 1.0, 1.0);
    const auto t0 = std::chrono::steady_clock::now();
    const FpTrajectory traj = solve_fp(rho0, make_vector_trajectory(dom));
    const double elapsed = seconds_since(t0);
    // Heat flow of a Gaussian: variance grows by 2 nu T.
    const ScalarField exact = gaussian_field(dom, 1.0 + 2.0 * dom.nu * dom.horizon, 1.0);
    const double err = l1_distance(traj.slices.back(), exact);
    r.passed = err < 1e-3 && elapsed < 2.0;
    r.measured = fmt("L1 error %.3e (< 1e-3), runtime %.3f s (< 2 s)", err, elapsed);
    r.values = {{"l1_error", err}, {"runtime", elapsed}};
    return r;
}

CriterionResult mass_conservation() {
    CriterionResult r;
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int run = 0; run < 30; ++run) {
        const DomainSpec dom = random_domain(rng, run);
        const ScalarField rho0 = random_density(dom, rng);
        const FpTrajectory traj = solve_fp(rho0, random_control(dom, 1.0 + run % 3, rng));
        const double m0 = rho0.mass();
        for (double m : traj.diagnostics.mass) worst = std::max(worst, std::abs(m - m0) / m0);
    }
    r.passed = worst <= 1e-12;
    r.measured = fmt("30 runs, max relative mass drift %.3e (<= 1e-12)", worst);
    r.values = {{"max_mass_drift", worst}};
    return r;
}

CriterionResult positivity() {
    CriterionResult r;
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> amp(0.5, 3.0);
    double lowest = kInfinity;
    long substeps = 0;
    for (int run = 0; run < 50; ++run) {
        const DomainSpec dom = random_domain(rng, run);
        const ScalarField rho0 = random_density(dom, rng);
        const FpTrajectory traj = solve_fp(rho0, random_control(dom, amp(rng), rng));
        for (const auto& s : traj.slices) lowest = std::min(lowest, s.min());
        substeps += traj.diagnostics.substeps;
    }
    r.passed = lowest >= 0.0;
    r.measured = fmt("50 runs, min density %.3e (>= 0), %ld transport sub-steps", lowest, substeps);
    r.values = {{"min_density", lowest}};
    return r;
}

CriterionResult contraction() {
    CriterionResult r;
    std::mt19937_64 rng(303);
    double worst = 0.0;
    bool ok = true;
    for (int pair = 0; pair < 20; ++pair) {
        const DomainSpec dom = random_domain(rng, pair);
        const VectorTrajectory u = random_control(dom, 1.5, rng);
        const ScalarField a = random_density(dom, rng);
        const ScalarField b = random_density(dom, rng);
        const ContractionReport rep = l1_contraction_check(a, b, u);
        ok = ok && rep.bounded;
        for (double d : rep.distance) worst = std::max(worst, d / rep.initial_distance);
    }
    r.passed = ok;
    r.measured = fmt("20 pairs, max |rho_a - rho_b|_1 / |rho0a - rho0b|_1 = %.12f (<= 1 + 1e-10)", worst);
    r.values = {{"max_ratio", worst}};
    return r;
}

CriterionResult decay() {
    CriterionResult r;
    const double m = 1.2, a = 1.0;
    const DomainSpec dom = domain_1d(10.0, 256, 200, 1.0, 0.5);
    const ScalarField delta = delta_field(dom);
    VectorTrajectory compress = make_vector_trajectory(dom);
    for (auto& f : compress)
        for (std::size_t i = 0; i < f.size(); ++i)
            f.component(0)[i] = -a * std::sin(std::numbers::pi * dom.coordinate(static_cast<int>(i)) / dom.half_width);
    const double D = HeatKernelSpec{dom.nu}.diffusivity();
    const DecayReport still = measure_decay(solve_fp(delta, make_vector_trajectory(dom)), m, 0.05, D);
    const DecayReport pushed = measure_decay(solve_fp(delta, compress), m, 0.05, D);
    const double bound = still.heat_constant * (1.0 + a) * delta.mass();
    r.passed = still.constant <= bound && pushed.constant <= bound;
    r.measured = fmt("sup |rho|_1.2 t^(1/12): u=0 %.4f, compressive %.4f, heat constant K %.4f, bound K(1+a) %.4f",
                     still.constant, pushed.constant, still.heat_constant, bound);
    r.values = {{"constant_zero_drift", still.constant}, {"constant_compressive", pushed.constant},
                {"heat_constant", still.heat_constant}};
    return r;
}

struct PresetSample {
    std::string name;
    Parameters params;
    bool scalar;
};

const std::vector<PresetSample>& fenchel_presets() {
    static const std::vector<PresetSample> p = {
        {"ball-indicator", {{"a", 1.5}}, false}, {"norm", {{"a", 1.5}}, false},
        {"quadratic", {{"c", 2.0}}, false},      {"quadratic-capped", {{"a", 1.5}}, false},
        {"huber", {{"a", 1.5}}, false},          {"sqrt", {{"a", 1.5}}, false},
        {"sqrt-lagrangian", {{"a", 1.5}}, false}, {"constant", {{"c", 0.7}}, false},
        {"zero", {}, false},                     {"origin-indicator", {{"c", 0.3}}, false},
        {"abs", {{"c", 0.8}}, true},             {"linear", {{"c", -0.4}}, true},
        {"quartic", {{"c", 0.5}}, true},         {"step-coupling", step_params(), true},
    };
    return p;
}

CriterionResult fenchel_identity() {
    CriterionResult r;
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const auto& presets = fenchel_presets();
    double worst_sub = 0.0, lowest_other = kInfinity;
    for (int s = 0; s < 1000; ++s) {
        const PresetSample& ps = presets[s % presets.size()];
        const IntegrandPtr f = make_integrand(ps.name, ps.params);
        const int d = ps.scalar ? 1 : 1 + (s / 14) % 2;
        const double radius = std::isfinite(f->domain_radius()) ? 0.99 * f->domain_radius() : 3.0;
        Vec u(d), eta(d);
        if (f->name() != "origin-indicator") {
            // Uniform in the ball (rejection), or in the box for full domains.
            do {
                for (auto& x : u) x = radius * unit(rng);
            } while (std::isfinite(f->domain_radius()) && std::sqrt(dot_self(u)) > radius);
        }
        const SubgradientSelection sel = subdiff_select(*f, u);
        worst_sub = std::max(worst_sub, std::abs(fenchel_residual(*f, u, sel.value)));
        for (auto& x : eta) x = 4.0 * unit(rng);
        lowest_other = std::min(lowest_other, fenchel_residual(*f, u, eta));
    }
    r.passed = worst_sub <= 1e-10 && lowest_other >= 0.0;
    r.measured = fmt("1000 samples: subgradient residual max %.3e (<= 1e-10); random eta residual min %.3e (>= 0)",
                     worst_sub, lowest_other);
    r.values = {{"max_subgradient_residual", worst_sub}, {"min_random_residual", lowest_other}};
    return r;
}

CriterionResult yosida_properties() {
    CriterionResult r;
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> x(-3.0, 3.0);
    const std::vector<double> levels{1.0, 0.3, 0.1, 0.03, 0.01};
    const std::vector<PresetSample> presets = {
        {"quadratic", {{"c", 2.0}}, true}, {"abs", {{"c", 0.8}}, true},  {"linear", {{"c", -0.4}}, true},
        {"quartic", {{"c", 0.5}}, true},   {"step-coupling", step_params(), true},
        {"huber", {{"a", 1.0}}, true},     {"sqrt", {{"a", 1.0}}, true}, {"zero", {}, true},
    };
    double lip = 0.0, envelope = -kInfinity, expansion = 0.0;
    for (const auto& ps : presets) {
        const IntegrandPtr g = make_integrand(ps.name, ps.params);
        for (int s = 0; s < 1000; ++s) {
            const double eps = levels[s % levels.size()];
            const double a = x(rng), b = x(rng);
            const double gap = std::abs(a - b);
            if (gap == 0.0) continue;
            lip = std::max(lip, std::abs(yosida_grad(*g, eps, a) - yosida_grad(*g, eps, b)) * eps / gap);
            envelope = std::max(envelope, yosida_value(*g, eps, a) - g->value(a));
            expansion = std::max(expansion, std::abs(resolve(*g, eps, a).point - resolve(*g, eps, b).point) / gap);
        }
    }
    r.passed = lip <= 1.0 + 1e-9 && envelope <= 1e-12 && expansion <= 1.0 + 1e-9;
    r.measured = fmt("8 presets x 1000: eps*Lip(g_eps') %.6f (<= 1), max g_eps - g %.3e (<= 0), resolvent ratio %.6f (<= 1)",
                     lip, envelope, expansion);
    r.values = {{"scaled_lipschitz", lip}, {"envelope_excess", envelope}, {"resolvent_ratio", expansion}};
    return r;
}

CriterionResult hjb_contraction() {
    CriterionResult r;
    const DomainSpec dom = domain_1d(8.0, 128, 128, 4.0, 0.5);
    const IntegrandPtr H = make_integrand("sqrt", {{"a", 3.0}});
    // Crowd-aversion style data: a Gaussian source and terminal cost.
    ScalarTrajectory eta = make_scalar_trajectory(dom);
    for (int k = 0; k <= dom.time_steps; ++k) {
        eta[k] = gaussian_field(dom, 1.0 + 0.5 * k * dom.dt(), 1.0, {1.0, 0.0});
        eta[k].set_time_index(k);
    }
    const ScalarField eta0 = gaussian_field(dom, 0.5, 2.0, {-1.0, 0.0});
    HjbOptions opt;
    opt.tol = 1e-12;
    const HjbTrajectory p = solve_hjb(eta, eta0, *H, opt);
    const HjbDiagnostics& dg = p.diagnostics;

    // Ratio on the accepted first slab and on its first half.
    const HeatKernelSpec kernel{dom.nu};
    ScalarTrajectory h = time_reverse(eta);
    for (auto& s : h) s *= -1.0;
    ScalarField p0 = eta0;
    p0 *= -1.0;
    const int steps = dg.slabs.front().last_step - dg.slabs.front().first_step;
    const int half = std::max(1, steps / 2);
    const VectorTrajectory w_full = assemble_w(p0, ScalarTrajectory(h.begin(), h.begin() + steps + 1), kernel);
    const VectorTrajectory w_half = assemble_w(p0, ScalarTrajectory(h.begin(), h.begin() + half + 1), kernel);
    const double r_full = measure_contraction_ratio(w_full, *H, kernel, 20, opt.seed);
    const double r_half = measure_contraction_ratio(w_half, *H, kernel, 20, opt.seed);
    const double factor = r_full / r_half;
    r.passed = r_full < 1.0 && factor >= 1.3 && dg.fixed_point_residual < 1e-8 && dg.slabs.size() > 1;
    r.measured = fmt("c_hat %.4f, slab %.3f of T=%.1f (%zu slabs), ratio %.4f, half-slab ratio %.4f (factor %.3f >= 1.3), "
                     "fixed-point residual %.2e (< 1e-8)",
                     dg.c_hat, dg.slab_T, dom.horizon, dg.slabs.size(), r_full, r_half, factor, dg.fixed_point_residual);
    r.values = {{"c_hat", dg.c_hat}, {"slab_T", dg.slab_T}, {"ratio", r_full}, {"half_ratio", r_half},
                {"fixed_point_residual", dg.fixed_point_residual}};
    return r;
}

CriterionResult cross_scheme() {
    CriterionResult r;
    const DomainSpec dom = domain_1d(8.0, 128, 64, 0.5, 0.5);
    const double budget = 10.0 * (dom.dx() + dom.dt());
    const ScalarField rho0 = gaussian_field(dom, 1.0, 1.0);
    const VectorTrajectory u = constant_control(dom, {0.5, 0.0});
    std::mt19937_64 rng(909);
    const VectorTrajectory wavy = random_control(dom, 0.5, rng);
    double fp_worst = 0.0;
    for (const auto* c : {&u, &wavy}) {
        const FpTrajectory fd = solve_fp(rho0, *c);
        const FpTrajectory mild = solve_fp_mild(rho0, *c);
        fp_worst = std::max(fp_worst, l1_distance(fd.slices.back(), mild.slices.back()));
    }
    const FpTrajectory heat = solve_fp(rho0, make_vector_trajectory(dom));
    const ScalarTrajectory eta = coupling_eta(heat.slices, *make_integrand("quadratic"), 0.0);
    const ScalarField eta0 = gaussian_field(dom, 0.5, 1.0);
    double hjb_worst = 0.0;
    std::string detail;
    for (const char* name : {"sqrt", "huber", "zero"}) {
        const IntegrandPtr H = make_integrand(name);
        const HjbTrajectory a = solve_hjb(eta, eta0, *H);
        const HjbTrajectory b = solve_hjb_fd(eta, eta0, *H);
        const double dist = l1_distance(a.p.front(), b.p.front());
        hjb_worst = std::max(hjb_worst, dist);
        detail += fmt(" %s %.2e", name, dist);
    }
    r.passed = fp_worst <= budget && hjb_worst <= budget;
    r.measured = fmt("FP fd vs mild %.3e, HJB mild vs fd at t=0:%s; budget 10(dx+dt) = %.3f", fp_worst, detail.c_str(),
                     budget);
    r.values = {{"fp_distance", fp_worst}, {"hjb_distance", hjb_worst}, {"budget", budget}};
    return r;
}

CriterionResult coupled_quadratic() {
    CriterionResult r;
    const MfgProblem pr = reference_problem("sqrt", 1.0, "quadratic");
    const auto t0 = std::chrono::steady_clock::now();
    const MfgState s = solve_mfg(pr);
    const double elapsed = seconds_since(t0);
    const ResidualReport res = optimality_residual(s, pr);
    r.passed = s.converged && res.max() < 1e-5 && s.outer_iterations <= 200 && elapsed < 60.0;
    r.measured = fmt("%s in %d outer iterations, %.2f s; r_FP %.2e r_HJB %.2e Fenchel %.2e coupling %.2e (all < 1e-5)",
                     s.status.c_str(), s.outer_iterations, elapsed, res.fp, res.hjb, res.fenchel_gap, res.coupling_gap);
    r.values = {{"outer_iterations", static_cast<double>(s.outer_iterations)}, {"runtime", elapsed}, {"r_fp", res.fp},
                {"r_hjb", res.hjb}, {"fenchel_gap", res.fenchel_gap}, {"coupling_gap", res.coupling_gap},
                {"cost", s.cost}};
    return r;
}

CriterionResult uniqueness() {
    CriterionResult r;
    const MfgProblem pr = reference_problem("sqrt", 1.0, "quadratic");
    const UniquenessReport u = uniqueness_probe(pr, {}, make_vector_trajectory(pr.domain),
                                                constant_control(pr.domain, {0.5, 0.0}));
    r.passed = u.guaranteed && u.converged_a && u.converged_b && u.rho_distance < 1e-5;
    r.measured = fmt("inits u=0 and u=a/2: |rho_a - rho_b|_L1(Q_T) %.3e (< 1e-5), |p_a - p_b| %.3e", u.rho_distance,
                     u.p_distance);
    r.values = {{"rho_distance", u.rho_distance}, {"p_distance", u.p_distance}};
    return r;
}

CriterionResult free_boundary() {
    CriterionResult r;
    const double a = 0.1;
    const MfgProblem pr = reference_problem("norm", a, "quadratic");
    MfgOptions opt;
    opt.tol = 1e-5;
    const MfgState s = solve_mfg(pr, opt);
    long flat = 0, moving = 0;
    double worst_flat = 0.0, worst_speed = 0.0;
    for (std::size_t k = 0; k < s.u.size(); ++k) {
        const ScalarField q = s.p.grad_p[k].magnitude();
        const ScalarField m = s.u[k].magnitude();
        for (std::size_t i = 0; i < q.size(); ++i) {
            if (q[i] < opt.gradient_tolerance) {
                ++flat;
                worst_flat = std::max(worst_flat, m[i]);
            } else {
                ++moving;
                worst_speed = std::max(worst_speed, std::abs(m[i] - a));
            }
        }
    }
    r.passed = s.converged && worst_flat == 0.0 && worst_speed <= 1e-8;
    r.measured = fmt("%s (a=%.1f, %d iterations, residual %.2e); |grad p| < tol on %ld cells, max |u| there %.1e (= 0); "
                     "%ld cells with max ||u| - a| %.1e (<= 1e-8)",
                     s.status.c_str(), a, s.outer_iterations, s.residuals.triple(), flat, worst_flat, moving, worst_speed);
    r.values = {{"flat_cells", static_cast<double>(flat)}, {"max_speed_error", worst_speed},
                {"residual", s.residuals.triple()}};
    return r;
}

CriterionResult filippov() {
    CriterionResult r;
    const MfgProblem pr = reference_problem("sqrt", 1.0, "step-coupling", step_params());
    MfgOptions opt;
    opt.tol = 1e-4;
    const MfgState s = solve_mfg(pr, opt);
    const auto graph = pr.g->subdifferential_graph();
    long jump_cells = 0, outside = 0;
    auto scan = [&](const ScalarField& rho, const ScalarField& eta) {
        for (std::size_t i = 0; i < rho.size(); ++i) {
            const ResolventPoint j = resolve(*pr.g, s.eps, rho[i]);
            for (const auto& jump : graph->jumps()) {
                if (j.point != jump.location) continue;
                ++jump_cells;
                if (eta[i] < jump.left || eta[i] > jump.right) ++outside;
            }
        }
    };
    for (std::size_t k = 0; k < s.eta.size(); ++k) scan(s.rho.slices[k], s.eta[k]);
    scan(s.rho.slices.back(), s.eta0);
    r.passed = s.converged && s.residuals.triple() < 1e-4 && jump_cells > 0 && outside == 0;
    r.measured = fmt("%s at eps=%.2g, residual %.2e (< 1e-4); %ld jump cells, %ld with eta outside [F(q-), F(q+)]",
                     s.status.c_str(), s.eps, s.residuals.triple(), jump_cells, outside);
    r.values = {{"residual", s.residuals.triple()}, {"jump_cells", static_cast<double>(jump_cells)},
                {"coupling_gap", s.residuals.coupling_gap}};
    return r;
}

CriterionResult particle_equivalence() {
    CriterionResult r;
    const MfgProblem pr = reference_problem("sqrt", 1.0, "quadratic");
    const MfgState s = solve_mfg(pr);
    const double D = HeatKernelSpec{pr.domain.nu}.diffusivity();
    const std::size_t n = 200000;
    const DistanceProfile coupled = compare_fp(simulate_particles(sample_ensemble(pr.rho0, n, 11), s.u, D), s.rho);

    const VectorTrajectory zero = make_vector_trajectory(pr.domain);
    const FpTrajectory heat = solve_fp(pr.rho0, zero);
    const double p1 = compare_fp(simulate_particles(sample_ensemble(pr.rho0, n, 12), zero, D), heat).plateau;
    const double p4 = compare_fp(simulate_particles(sample_ensemble(pr.rho0, 4 * n, 13), zero, D), heat).plateau;
    const double shrink = p4 / p1;
    r.passed = coupled.max < 0.05 && shrink >= 0.5 * 0.7 && shrink <= 0.5 * 1.3;
    r.measured = fmt("N=2e5 max L1 %.4f (< 0.05); diffusion plateau %.5f -> %.5f at 4N, ratio %.3f (0.5 +- 30%%)",
                     coupled.max, p1, p4, shrink);
    r.values = {{"max_distance", coupled.max}, {"plateau_n", p1}, {"plateau_4n", p4}};
    return r;
}

struct Entry {
    CriterionInfo info;
    std::function<CriterionResult()> fn;
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> e = {
        {{1, "pure-diffusion oracle"}, pure_diffusion},
        {{2, "mass conservation"}, mass_conservation},
        {{3, "positivity"}, positivity},
        {{4, "L1 contraction"}, contraction},
        {{5, "decay estimate shape"}, decay},
        {{6, "Fenchel identity"}, fenchel_identity},
        {{7, "Yosida properties"}, yosida_properties},
        {{8, "HJB contraction"}, hjb_contraction},
        {{9, "cross-scheme oracles"}, cross_scheme},
        {{10, "coupled MFG, quadratic preset"}, coupled_quadratic},
        {{11, "uniqueness"}, uniqueness},
        {{12, "free boundary"}, free_boundary},
        {{13, "Filippov coupling"}, filippov},
        {{14, "particle equivalence"}, particle_equivalence},
    };
    return e;
}

}  // namespace

const std::vector<CriterionInfo>& criteria() {
    static const std::vector<CriterionInfo> c = [] {
        std::vector<CriterionInfo> out;
        for (const auto& e : registry()) out.push_back(e.info);
        return out;
    }();
    return c;
}

CriterionResult run_criterion(int id) {
    for (const auto& e : registry()) {
        if (e.info.id != id) continue;
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = e.fn();
        } catch (const std::exception& ex) {
            r.passed = false;
            r.measured = std::string("error: ") + ex.what();
        }
        r.id = id;
        r.name = e.info.name;
        r.seconds = seconds_since(t0);
        return r;
    }
    throw std::invalid_argument("no acceptance criterion " + std::to_string(id));
}

std::vector<CriterionResult> run_verification(const std::vector<int>& ids) {
    std::vector<CriterionResult> out;
    if (ids.empty()) {
        for (const auto& c : criteria()) out.push_back(run_criterion(c.id));
    } else {
        for (int id : ids) out.push_back(run_criterion(id));
    }
    return out;
}

}  // namespace mfg
