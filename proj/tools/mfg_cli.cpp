// mfgsolve: command-line driver for the mean field game solver.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "mfg/config.hpp"
#include "mfg/coupler.hpp"
#include "mfg/field_io.hpp"
#include "mfg/fokker_planck.hpp"
#include "mfg/hjb.hpp"
#include "mfg/particles.hpp"
#include "mfg/verification.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace mfg;

namespace {

enum Exit { kPass = 0, kUsage = 1, kNoConvergence = 2, kConfigViolation = 3, kVerifyFailure = 4 };

struct Context {
    SolverConfig cfg;
    fs::path out;
};

fs::path output_dir(const SolverConfig& cfg, const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("MFG_OUTPUT_DIR"); env && *env) return env;
    return cfg.run.output_dir;
}

void dump(const Context& c, const ScalarTrajectory& t, const std::string& stem) {
    const std::string& f = c.cfg.run.format;
    if (f == "none") return;
    const int cadence = c.cfg.run.dump_cadence;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (k % cadence != 0 && k + 1 != t.size()) continue;
        char name[64];
        std::snprintf(name, sizeof name, "%s_%05zu", stem.c_str(), k);
        if (f == "csv" || f == "both") write_csv(t[k], c.out / (std::string(name) + ".csv"));
        if (f == "binary" || f == "both") write_binary(t[k], c.out / (std::string(name) + ".bin"));
    }
}

void dump(const Context& c, const VectorTrajectory& t, const std::string& stem) {
    if (t.empty()) return;
    static const char* suffix[2] = {"_x", "_y"};
    for (int a = 0; a < t.front().dim(); ++a) {
        ScalarTrajectory comp;
        for (const auto& v : t) comp.emplace_back(v.domain(), v.component(a), v.time_index());
        dump(c, comp, stem + suffix[a]);
    }
}

json domain_json(const DomainSpec& d) {
    return {{"dim", d.dim}, {"half_width", d.half_width}, {"points", d.points},
            {"time_steps", d.time_steps}, {"horizon", d.horizon}, {"nu", d.nu}};
}

json base_json(const Context& c, const std::string& command) {
    const SolverConfig& s = c.cfg;
    return {{"command", command},
            {"domain", domain_json(s.domain)},
            {"problem",
             {{"hamiltonian", s.hamiltonian_name},
              {"lagrangian", s.lagrangian_name},
              {"g", s.g_name},
              {"g0", s.g0_name},
              {"control_bound", s.control_bound},
              {"kernel", s.problem.convention == KernelConvention::OperatorConsistent ? "operator" : "squared"}}},
            {"hypotheses", s.hypotheses}};
}

void write_json(const Context& c, const json& j, const std::string& name = "diagnostics.json") {
    std::ofstream(c.out / name) << j.dump(2) << '\n';
}

json residual_json(const ResidualReport& r) {
    return {{"fp", r.fp}, {"hjb", r.hjb}, {"fenchel_gap", r.fenchel_gap}, {"coupling_gap", r.coupling_gap}};
}

json fp_json(const FpDiagnostics& d, double m0) {
    double drift = 0.0, lowest = kInfinity;
    for (double m : d.mass) drift = std::max(drift, std::abs(m - m0) / m0);
    for (double v : d.min_value) lowest = std::min(lowest, v);
    return {{"max_relative_mass_drift", drift}, {"min_density", lowest}, {"substeps", d.substeps},
            {"picard_iterations", d.picard_iterations}, {"slabs", d.slabs},
            {"boundary_fraction", d.boundary_fraction}};
}

json hjb_json(const HjbDiagnostics& d) {
    json slabs = json::array();
    for (const auto& s : d.slabs)
        slabs.push_back({{"first_step", s.first_step}, {"last_step", s.last_step}, {"ratio", s.ratio},
                         {"iterations", s.iterations}, {"residual", s.residual}});
    return {{"c_hat", d.c_hat}, {"slab_T", d.slab_T}, {"max_ratio", d.max_ratio},
            {"fixed_point_residual", d.fixed_point_residual}, {"halvings", d.halvings}, {"slabs", slabs}};
}

VectorTrajectory load_control(const SolverConfig& cfg) {
    const DomainSpec& dom = cfg.domain;
    if (cfg.run.control_dir.empty()) return constant_control(dom, cfg.drift);
    VectorTrajectory u = make_vector_trajectory(dom);
    static const char* suffix[2] = {"x", "y"};
    for (int k = 0; k <= dom.time_steps; ++k) {
        for (int a = 0; a < dom.dim; ++a) {
            char name[64];
            std::snprintf(name, sizeof name, "u_%s_%05d.bin", suffix[a], k);
            u[k].component(a) = read_binary_field(cfg.run.control_dir / name, dom).values();
        }
    }
    return u;
}

// Source for a standalone backward solve: couplings of the uncontrolled flow.
double coupling_level(const SolverConfig& cfg) {
    const auto g = cfg.problem.g->subdifferential_graph();
    const auto g0 = cfg.problem.g0->subdifferential_graph();
    const bool smooth = g && g->single_valued() && g0 && g0->single_valued();
    return smooth ? 0.0 : cfg.options.schedule.ladder.back();
}

int solve_fp_cmd(Context& c) {
    const VectorTrajectory u = load_control(c.cfg);
    const FpTrajectory t = c.cfg.fp_scheme == "mild" ? solve_fp_mild(c.cfg.problem.rho0, u, c.cfg.options.fp)
                                                     : solve_fp(c.cfg.problem.rho0, u, c.cfg.options.fp);
    dump(c, t.slices, "rho");
    json j = base_json(c, "solve-fp");
    j["scheme"] = c.cfg.fp_scheme;
    j["fp"] = fp_json(t.diagnostics, c.cfg.problem.rho0.mass());
    write_json(c, j);
    std::printf("solve-fp (%s): %zu slices, max mass drift %.3e\n", c.cfg.fp_scheme.c_str(), t.slices.size(),
                j["fp"]["max_relative_mass_drift"].get<double>());
    return kPass;
}

int solve_hjb_cmd(Context& c) {
    const SolverConfig& s = c.cfg;
    const FpTrajectory heat = solve_fp(s.problem.rho0, make_vector_trajectory(s.domain), s.options.fp);
    const double eps = coupling_level(s);
    const ScalarTrajectory eta = coupling_eta(heat.slices, *s.problem.g, eps);
    const ScalarField eta0 = terminal_eta0(heat.slices.back(), *s.problem.g0, eps);
    const HjbTrajectory p = s.hjb_scheme == "fd" ? solve_hjb_fd(eta, eta0, *s.problem.hamiltonian, s.options.hjb)
                                                 : solve_hjb(eta, eta0, *s.problem.hamiltonian, s.options.hjb);
    dump(c, p.p, "p");
    dump(c, p.grad_p, "grad_p");
    json j = base_json(c, "solve-hjb");
    j["scheme"] = s.hjb_scheme;
    j["coupling_eps"] = eps;
    j["hjb"] = hjb_json(p.diagnostics);
    write_json(c, j);
    std::printf("solve-hjb (%s): slab %.4g, fixed-point residual %.3e\n", s.hjb_scheme.c_str(),
                p.diagnostics.slab_T, p.diagnostics.fixed_point_residual);
    return kPass;
}

int solve_mfg_cmd(Context& c) {
    const SolverConfig& s = c.cfg;
    const auto t0 = std::chrono::steady_clock::now();
    const MfgState st = solve_mfg(s.problem, s.options);
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const ResidualReport res = optimality_residual(st, s.problem, s.options);

    dump(c, st.rho.slices, "rho");
    dump(c, st.p.p, "p");
    dump(c, st.u, "u");
    // Full-resolution control for simulate-particles and solve-fp, independent of format and cadence.
    fs::create_directories(c.out / "control");
    static const char* suffix[2] = {"x", "y"};
    for (std::size_t k = 0; k < st.u.size(); ++k) {
        for (int a = 0; a < st.u[k].dim(); ++a) {
            char name[64];
            std::snprintf(name, sizeof name, "u_%s_%05zu.bin", suffix[a], k);
            write_binary(ScalarField(s.domain, st.u[k].component(a)), c.out / "control" / name);
        }
    }
    dump(c, st.eta, "eta");
    if (s.run.format != "none") dump(c, ScalarTrajectory{st.eta0}, "eta0");

    std::ofstream h(c.out / "residual_history.csv");
    h << "level,eps,iteration,theta,cost,r_fp,r_hjb,fenchel_gap,coupling_gap\n";
    h.precision(17);
    for (const auto& r : st.history)
        h << r.level << ',' << r.eps << ',' << r.iteration << ',' << r.theta << ',' << r.cost << ',' << r.residuals.fp
          << ',' << r.residuals.hjb << ',' << r.residuals.fenchel_gap << ',' << r.residuals.coupling_gap << '\n';

    json j = base_json(c, "solve-mfg");
    j["status"] = st.status;
    j["converged"] = st.converged;
    j["outer_iterations"] = st.outer_iterations;
    j["eps"] = st.eps;
    j["cost"] = st.cost;
    j["residuals"] = residual_json(res);
    j["eps_ladder"] = s.options.schedule.ladder;
    j["hjb"] = hjb_json(st.p.diagnostics);
    j["fp"] = fp_json(st.rho.diagnostics, s.problem.rho0.mass());
    json costs = json::array();
    for (const auto& r : st.history) costs.push_back(r.cost);
    j["cost_history"] = costs;
    write_json(c, j);
    std::printf("solve-mfg: %s after %d iterations (%.2f s); r_FP %.2e r_HJB %.2e Fenchel %.2e coupling %.2e\n",
                st.status.c_str(), st.outer_iterations, elapsed, res.fp, res.hjb, res.fenchel_gap, res.coupling_gap);
    return st.converged ? kPass : kNoConvergence;
}

int simulate_cmd(Context& c) {
    const SolverConfig& s = c.cfg;
    const VectorTrajectory u = load_control(s);
    const double D = HeatKernelSpec{s.domain.nu, s.problem.convention}.diffusivity();
    const FpTrajectory fp = solve_fp(s.problem.rho0, u, s.options.fp);
    const ParticleRun run = simulate_particles(sample_ensemble(s.problem.rho0, s.run.particles, s.run.seed), u, D);
    const DistanceProfile d = compare_fp(run, fp);
    std::ofstream csv(c.out / "distance_profile.csv");
    csv.precision(17);
    csv << "t,l1_distance\n";
    for (std::size_t k = 0; k < d.times.size(); ++k) csv << d.times[k] << ',' << d.distance[k] << '\n';
    dump(c, ScalarTrajectory(run.densities), "empirical");
    json j = base_json(c, "simulate-particles");
    j["particles"] = run.particles;
    j["seed"] = run.seed;
    j["generator"] = run.generator;
    j["control"] = s.run.control_dir.empty() ? "constant drift" : s.run.control_dir.string();
    j["max_distance"] = d.max;
    j["plateau"] = d.plateau;
    write_json(c, j);
    std::printf("simulate-particles: %zu particles, max L1 distance %.4f, plateau %.4f\n", run.particles, d.max,
                d.plateau);
    return kPass;
}

int verify_cmd(Context& c, const std::vector<int>& only) {
    const std::vector<CriterionResult> results = run_verification(only);
    std::ofstream table(c.out / "verify.csv");
    table << "id,name,result,measured\n";
    json j;
    j["command"] = "verify";
    j["criteria"] = json::array();
    bool all = true;
    for (const auto& r : results) {
        all = all && r.passed;
        std::printf("[%s] %2d %-30s %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.measured.c_str());
        table << r.id << ",\"" << r.name << "\"," << (r.passed ? "pass" : "fail") << ",\"" << r.measured << "\"\n";
        j["criteria"].push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"values", r.values}});
    }
    j["all_passed"] = all;
    write_json(c, j);
    return all ? kPass : kVerifyFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mean field game solver: Fokker-Planck, Hamilton-Jacobi and coupled solves"};
    app.require_subcommand(1, 1);
    std::string config_path, out_flag;
    std::vector<int> only;

    auto add = [&](const std::string& name, const std::string& help, bool config_required) {
        CLI::App* sub = app.add_subcommand(name, help);
        auto* opt = sub->add_option("-c,--config", config_path, "INI configuration file");
        if (config_required) opt->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--output", out_flag, "output directory (overrides MFG_OUTPUT_DIR and run.output_dir)");
        return sub;
    };
    add("solve-fp", "forward Fokker-Planck solve for a given control", true);
    add("solve-hjb", "backward Hamilton-Jacobi solve with couplings of the uncontrolled flow", true);
    add("solve-mfg", "coupled mean field game solve", true);
    add("simulate-particles", "Euler-Maruyama particles against the Fokker-Planck density", true);
    CLI::App* verify = add("verify", "run the acceptance suite and write a pass/fail table", false);
    verify->add_option("--only", only, "criterion ids to run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return kUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    Context ctx;
    try {
        if (!config_path.empty()) ctx.cfg = load_config(config_path);
    } catch (const ConfigError& e) {
        for (const auto& v : e.violations()) std::cerr << "config: " << v << '\n';
        return kConfigViolation;
    }
    ctx.out = output_dir(ctx.cfg, out_flag);
    std::error_code ec;
    fs::create_directories(ctx.out, ec);
    if (ec) {
        std::cerr << "cannot create output directory " << ctx.out << ": " << ec.message() << '\n';
        return kUsage;
    }

    try {
        if (command == "solve-fp") return solve_fp_cmd(ctx);
        if (command == "solve-hjb") return solve_hjb_cmd(ctx);
        if (command == "solve-mfg") return solve_mfg_cmd(ctx);
        if (command == "simulate-particles") return simulate_cmd(ctx);
        return verify_cmd(ctx, only);
    } catch (const std::runtime_error& e) {
        // Solver failures (stalled fixed points, CFL limits) are non-convergence.
        std::cerr << command << ": " << e.what() << '\n';
        return kNoConvergence;
    } catch (const std::exception& e) {
        std::cerr << command << ": " << e.what() << '\n';
        return kConfigViolation;
    }
}
