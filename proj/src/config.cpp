#include "mfg/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mfg/presets.hpp"

namespace mfg {

namespace {

namespace pt = boost::property_tree;

std::string join(const std::vector<std::string>& v) {
    std::string s = "invalid configuration:";
    for (const auto& x : v) s += "\n  " + x;
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

class Reader {
public:
    Reader(const pt::ptree& tree, std::vector<std::string>& violations) : tree_(tree), v_(violations) {}

    const pt::ptree* section(const std::string& name) const {
        auto it = tree_.find(name);
        return it == tree_.not_found() ? nullptr : &it->second;
    }

    std::optional<std::string> raw(const std::string& sec, const std::string& key) {
        used_.insert(sec + "/" + key);
        const pt::ptree* s = section(sec);
        if (!s) return std::nullopt;
        auto it = s->find(key);
        if (it == s->not_found()) return std::nullopt;
        return trim(it->second.data());
    }

    void real(const std::string& sec, const std::string& key, double& out) {
        if (auto r = raw(sec, key)) {
            if (auto x = to_real(sec, key, *r)) out = *x;
        }
    }

    void integer(const std::string& sec, const std::string& key, int& out) {
        if (auto r = raw(sec, key)) {
            try {
                std::size_t pos = 0;
                const long x = std::stol(*r, &pos);
                if (pos != r->size()) throw std::invalid_argument("trailing");
                out = static_cast<int>(x);
            } catch (const std::exception&) {
                v_.push_back(sec + "." + key + ": expected an integer, got '" + *r + "'");
            }
        }
    }

    void text(const std::string& sec, const std::string& key, std::string& out) {
        if (auto r = raw(sec, key)) out = *r;
    }

    void boolean(const std::string& sec, const std::string& key, bool& out) {
        if (auto r = raw(sec, key)) {
            if (*r == "true" || *r == "1" || *r == "yes")
                out = true;
            else if (*r == "false" || *r == "0" || *r == "no")
                out = false;
            else
                v_.push_back(sec + "." + key + ": expected true or false, got '" + *r + "'");
        }
    }

    std::optional<double> to_real(const std::string& sec, const std::string& key, const std::string& s) {
        try {
            std::size_t pos = 0;
            const double x = std::stod(s, &pos);
            if (pos != s.size() || !std::isfinite(x)) throw std::invalid_argument("trailing");
            return x;
        } catch (const std::exception&) {
            v_.push_back(sec + "." + key + ": expected a finite number, got '" + s + "'");
            return std::nullopt;
        }
    }

    /// Keys "<prefix>.<param>" in a section, as preset parameters.
    Parameters params(const std::string& sec, const std::string& prefix) {
        Parameters p;
        const pt::ptree* s = section(sec);
        if (!s) return p;
        const std::string lead = prefix + ".";
        for (const auto& [key, node] : *s) {
            if (key.rfind(lead, 0) != 0) continue;
            used_.insert(sec + "/" + key);
            if (auto x = to_real(sec, key, trim(node.data()))) p[key.substr(lead.size())] = *x;
        }
        return p;
    }

    void report_unknown() {
        for (const auto& [sec, node] : tree_) {
            if (node.empty() && !node.data().empty()) {
                v_.push_back(sec + ": key outside any section");
                continue;
            }
            if (sec != "domain" && sec != "problem" && sec != "solver" && sec != "run") {
                v_.push_back("[" + sec + "]: unknown section");
                continue;
            }
            for (const auto& [key, val] : node) {
                if (!used_.count(sec + "/" + key)) v_.push_back(sec + "." + key + ": unknown key");
            }
        }
    }

private:
    const pt::ptree& tree_;
    std::vector<std::string>& v_;
    std::set<std::string> used_;
};

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Samples |q| on a geometric ladder; returns sup (H(q) - a|q|) over the ladder.
double excess_over_linear(const ConvexIntegrand& H, double a, int dim) {
    double worst = -kInfinity;
    for (double r = 1e-3; r <= 1e6; r *= 10.0) {
        std::array<double, 2> q{r, 0.0};
        worst = std::max(worst, H.value(std::span<const double>(q.data(), dim)) - a * r);
    }
    return worst;
}

double inf_over_ladder(const ConvexIntegrand& H, int dim) {
    double lo = kInfinity;
    for (double r = 0.0; r <= 1e6; r = (r == 0.0 ? 1e-3 : r * 10.0)) {
        for (double s : {-1.0, 1.0}) {
            std::array<double, 2> q{s * r, 0.0};
            lo = std::min(lo, H.value(std::span<const double>(q.data(), dim)));
        }
    }
    return lo;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

ScalarField make_initial_density(const DomainSpec& domain, const InitialDensity& spec) {
    if (spec.kind == "uniform") return ScalarField(domain, spec.mass / domain.measure());
    return gaussian_field(domain, spec.variance, spec.mass, spec.center);
}

SolverConfig parse_config(const std::string& text) {
    pt::ptree tree;
    std::vector<std::string> v;
    try {
        std::istringstream in(text);
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError({std::string("syntax: ") + e.message() + " (line " + std::to_string(e.line()) + ")"});
    }
    Reader r(tree, v);
    SolverConfig c;

    DomainSpec& d = c.domain;
    r.integer("domain", "dim", d.dim);
    r.real("domain", "half_width", d.half_width);
    r.integer("domain", "points", d.points);
    r.integer("domain", "time_steps", d.time_steps);
    r.real("domain", "horizon", d.horizon);
    r.real("domain", "nu", d.nu);
    if (d.dim != 1 && d.dim != 2) v.push_back("domain.dim: must be 1 or 2");
    if (!(d.half_width > 0.0)) v.push_back("domain.half_width: must be positive");
    if (!is_power_of_two(d.points) || d.points < 8) v.push_back("domain.points: must be a power of two, at least 8");
    if (d.time_steps < 1) v.push_back("domain.time_steps: must be positive");
    if (!(d.horizon > 0.0)) v.push_back("domain.horizon: must be positive");
    if (!(d.nu > 0.0)) v.push_back("domain.nu: diffusion coefficient must be positive");

    // Problem block.
    r.real("problem", "control_bound", c.control_bound);
    if (!(c.control_bound > 0.0)) v.push_back("problem.control_bound: control bound must be positive (bounded control set)");
    std::string h_name, l_name, g_name = "quadratic", g0_name = "quadratic";
    r.text("problem", "hamiltonian", h_name);
    r.text("problem", "lagrangian", l_name);
    r.text("problem", "g", g_name);
    r.text("problem", "g0", g0_name);
    Parameters hp = r.params("problem", "hamiltonian");
    Parameters lp = r.params("problem", "lagrangian");
    const Parameters gp = r.params("problem", "g");
    const Parameters g0p = r.params("problem", "g0");
    if (!h_name.empty() && !l_name.empty()) v.push_back("problem.lagrangian: give either hamiltonian or lagrangian, not both");
    if (h_name.empty() && l_name.empty()) h_name = "sqrt";
    if (c.control_bound > 0.0) {
        hp.try_emplace("a", c.control_bound);
        lp.try_emplace("a", c.control_bound);
    }

    std::string drift;
    r.text("problem", "drift", drift);
    if (!drift.empty()) {
        auto parts = split_list(drift);
        if (parts.size() != static_cast<std::size_t>(d.dim))
            v.push_back("problem.drift: needs one entry per dimension");
        for (std::size_t i = 0; i < std::min<std::size_t>(2, parts.size()); ++i)
            if (auto x = r.to_real("problem", "drift", parts[i])) c.drift[i] = *x;
        if (std::hypot(c.drift[0], c.drift[1]) > c.control_bound)
            v.push_back("problem.drift: exceeds the control bound (bounded control set)");
    }

    r.text("problem", "initial", c.initial.kind);
    r.real("problem", "initial_variance", c.initial.variance);
    r.real("problem", "initial_mass", c.initial.mass);
    std::string center;
    r.text("problem", "initial_center", center);
    if (!center.empty()) {
        auto parts = split_list(center);
        for (std::size_t i = 0; i < std::min<std::size_t>(2, parts.size()); ++i)
            if (auto x = r.to_real("problem", "initial_center", parts[i])) c.initial.center[i] = *x;
    }
    if (c.initial.kind != "gaussian" && c.initial.kind != "uniform")
        v.push_back("problem.initial: must be gaussian or uniform");
    if (!(c.initial.variance > 0.0)) v.push_back("problem.initial_variance: must be positive");
    if (!(c.initial.mass > 0.0)) v.push_back("problem.initial_mass: must be positive");

    // Solver block.
    MfgOptions& o = c.options;
    std::string ladder, kernel = "operator";
    r.text("solver", "eps_ladder", ladder);
    if (!ladder.empty()) {
        o.schedule.ladder.clear();
        for (const auto& s : split_list(ladder))
            if (auto x = r.to_real("solver", "eps_ladder", s)) o.schedule.ladder.push_back(*x);
    }
    r.boolean("solver", "exact_final_level", o.schedule.exact_final_level);
    r.real("solver", "damping", o.schedule.theta);
    r.real("solver", "damping_decay", o.schedule.theta_decay);
    r.real("solver", "damping_min", o.schedule.theta_min);
    r.integer("solver", "max_per_level", o.schedule.max_per_level);
    r.real("solver", "level_tol", o.schedule.level_tol);
    r.real("solver", "tol", o.tol);
    r.integer("solver", "max_outer", o.max_outer);
    r.real("solver", "gradient_tolerance", o.gradient_tolerance);
    r.real("solver", "hjb_tol", o.hjb.tol);
    r.integer("solver", "hjb_max_iterations", o.hjb.max_iterations);
    r.real("solver", "slab_T", o.hjb.slab_T);
    r.integer("solver", "ratio_pairs", o.hjb.ratio_pairs);
    r.integer("solver", "max_halvings", o.hjb.max_halvings);
    r.text("solver", "kernel", kernel);
    r.text("solver", "fp_scheme", c.fp_scheme);
    r.text("solver", "hjb_scheme", c.hjb_scheme);
    try {
        o.schedule.validate();
    } catch (const std::invalid_argument& e) {
        v.push_back(std::string("solver: ") + e.what());
    }
    if (!(o.tol > 0.0)) v.push_back("solver.tol: must be positive");
    if (o.max_outer < 1) v.push_back("solver.max_outer: must be positive");
    if (!(o.gradient_tolerance >= 0.0)) v.push_back("solver.gradient_tolerance: must be nonnegative");
    if (!(o.hjb.tol > 0.0)) v.push_back("solver.hjb_tol: must be positive");
    if (o.hjb.slab_T < 0.0) v.push_back("solver.slab_T: must be nonnegative (0 selects it from the measured constant)");
    if (o.hjb.ratio_pairs < 0) v.push_back("solver.ratio_pairs: must be nonnegative");
    KernelConvention conv = KernelConvention::OperatorConsistent;
    if (kernel == "squared")
        conv = KernelConvention::SquaredNu;
    else if (kernel != "operator")
        v.push_back("solver.kernel: must be operator or squared");
    o.fp.convention = o.hjb.convention = conv;
    if (c.fp_scheme != "fd" && c.fp_scheme != "mild") v.push_back("solver.fp_scheme: must be fd or mild");
    if (c.hjb_scheme != "mild" && c.hjb_scheme != "fd") v.push_back("solver.hjb_scheme: must be mild or fd");

    // Run block.
    int seed = static_cast<int>(c.run.seed);
    r.integer("run", "seed", seed);
    if (seed < 0) v.push_back("run.seed: must be nonnegative");
    c.run.seed = static_cast<std::uint64_t>(std::max(0, seed));
    std::string out_dir = c.run.output_dir.string(), control_dir;
    r.text("run", "output_dir", out_dir);
    r.text("run", "control_dir", control_dir);
    c.run.output_dir = out_dir;
    c.run.control_dir = control_dir;
    r.integer("run", "dump_cadence", c.run.dump_cadence);
    r.text("run", "format", c.run.format);
    int particles = static_cast<int>(c.run.particles);
    r.integer("run", "particles", particles);
    if (particles < 1) v.push_back("run.particles: must be positive");
    c.run.particles = static_cast<std::size_t>(std::max(1, particles));
    if (c.run.dump_cadence < 1) v.push_back("run.dump_cadence: must be positive");
    if (c.run.format != "csv" && c.run.format != "binary" && c.run.format != "both" && c.run.format != "none")
        v.push_back("run.format: must be csv, binary, both or none");

    r.report_unknown();

    // Integrands and the hypothesis envelopes they must satisfy.
    IntegrandPtr H, L, g, g0;
    try {
        if (!l_name.empty()) {
            L = make_integrand(l_name, lp);
            if (!std::isfinite(L->domain_radius()))
                v.push_back("problem.lagrangian: '" + l_name + "' must be +inf outside a ball (bounded control set)");
            else
                H = hamiltonian_from_lagrangian(L);
        } else {
            H = make_integrand(h_name, hp);
            L = H->conjugate_partner();
            if (!L) v.push_back("problem.hamiltonian: '" + h_name + "' has no closed-form Lagrangian partner");
        }
    } catch (const std::exception& e) {
        v.push_back(std::string("problem: ") + e.what());
    }
    try {
        g = make_integrand(g_name, gp);
    } catch (const std::exception& e) {
        v.push_back(std::string("problem.g: ") + e.what());
    }
    try {
        g0 = make_integrand(g0_name, g0p);
    } catch (const std::exception& e) {
        v.push_back(std::string("problem.g0: ") + e.what());
    }

    auto check = [&](const std::string& name, bool ok, const std::string& message) {
        c.hypotheses[name] = ok;
        if (!ok) v.push_back(message);
    };
    if (H && L && d.dim >= 1 && d.dim <= 2 && c.control_bound > 0.0) {
        const double a = c.control_bound;
        check("control set bounded", H->lipschitz_constant() <= a * (1.0 + 1e-12),
              "problem.hamiltonian: Lipschitz constant " + std::to_string(H->lipschitz_constant()) +
                  " exceeds the control bound " + std::to_string(a) + " (bounded control set)");
        check("hamiltonian linear envelope", excess_over_linear(*H, a, d.dim) < kInfinity,
              "problem.hamiltonian: H(q) - a|q| is unbounded above (linear growth envelope of H)");
        std::array<double, 1> zero{0.0};
        check("lagrangian finite at rest", std::isfinite(L->value(std::span<const double>(zero.data(), 1))),
              "problem.lagrangian: L(0) must be finite (running cost bounded at rest)");
        check("hamiltonian bounded below", std::isfinite(inf_over_ladder(*H, d.dim)),
              "problem.hamiltonian: H must be bounded below (lower envelope of H)");
    }
    if (g) {
        check("running coupling linear lower bound", std::isfinite(g->value(0.0)),
              "problem.g: g(0) must be finite (linear lower bound on the running coupling)");
        check("running coupling growth ratio", g->growth_exponent().has_value(),
              "problem.g: '" + g->name() + "' has no polynomial growth bound (growth ratio condition on g)");
    }
    if (g0) {
        const auto p = g0->growth_exponent();
        check("terminal cost quadratic envelope", p.has_value() && *p <= 2.0,
              "problem.g0: '" + g0->name() + "' grows faster than C1 r^2 + C2 (terminal cost quadratic envelope)");
        check("terminal cost linear lower bound", std::isfinite(g0->value(0.0)),
              "problem.g0: g0(0) must be finite (linear lower bound on the terminal cost)");
    }
    if (g) c.hypotheses["uniqueness (strictly convex g)"] = g->strictly_convex();

    if (!v.empty()) throw ConfigError(std::move(v));

    c.hamiltonian_name = H->name();
    c.lagrangian_name = L->name();
    c.g_name = g->name();
    c.g0_name = g0->name();
    c.problem.domain = d;
    c.problem.hamiltonian = H;
    c.problem.lagrangian = L;
    c.problem.g = g;
    c.problem.g0 = g0;
    c.problem.convention = conv;
    c.problem.rho0 = make_initial_density(d, c.initial);
    if (!(c.problem.rho0.min() > 0.0))
        throw ConfigError({"problem.initial: density vanishes on some cells (positive initial density with integrable log)"});
    return c;
}

SolverConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file '" + path.string() + "'"});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace mfg
