#include <fstream>
#include <sstream>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mfg/config.hpp"
#include "mfg/coupler.hpp"
#include "mfg/fokker_planck.hpp"
#include "mfg/hjb.hpp"
#include "mfg/particles.hpp"
#include "mfg/presets.hpp"
#include "mfg/verification.hpp"

namespace py = pybind11;
using namespace mfg;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Slices stacked along axis 0; d = 2 fields are (N, N) with axis order (y, x).
Array stack(const ScalarTrajectory& t) {
    const DomainSpec& d = t.front().domain();
    std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(t.size())};
    for (int a = 0; a < d.dim; ++a) shape.push_back(d.points);
    Array out(shape);
    double* p = out.mutable_data();
    for (const auto& s : t) p = std::copy(s.values().begin(), s.values().end(), p);
    return out;
}

// Control trajectories: (N_T + 1, d, N[, N]).
Array stack(const VectorTrajectory& t) {
    const DomainSpec& d = t.front().domain();
    std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(t.size()), d.dim};
    for (int a = 0; a < d.dim; ++a) shape.push_back(d.points);
    Array out(shape);
    double* p = out.mutable_data();
    for (const auto& s : t)
        for (int a = 0; a < d.dim; ++a) p = std::copy(s.component(a).begin(), s.component(a).end(), p);
    return out;
}

VectorTrajectory unstack(const DomainSpec& d, const Array& u) {
    const std::size_t slices = d.time_steps + 1;
    if (static_cast<std::size_t>(u.size()) != slices * d.dim * d.cells())
        throw py::value_error("control must have shape (time_steps + 1, dim, points[, points])");
    VectorTrajectory t = make_vector_trajectory(d);
    const double* p = u.data();
    for (auto& s : t)
        for (int a = 0; a < d.dim; ++a, p += d.cells()) std::copy(p, p + d.cells(), s.component(a).begin());
    return t;
}

VectorTrajectory control_or_drift(const SolverConfig& c, const std::optional<Array>& u) {
    return u ? unstack(c.domain, *u) : constant_control(c.domain, c.drift);
}

py::dict residuals(const ResidualReport& r) {
    py::dict d;
    d["fp"] = r.fp;
    d["hjb"] = r.hjb;
    d["fenchel_gap"] = r.fenchel_gap;
    d["coupling_gap"] = r.coupling_gap;
    return d;
}

SolverConfig config_from(const std::string& text) {
    try {
        return parse_config(text);
    } catch (const ConfigError& e) {
        std::string msg;
        for (const auto& v : e.violations()) msg += (msg.empty() ? "" : "\n") + v;
        throw py::value_error(msg);
    }
}

}  // namespace

PYBIND11_MODULE(_mfgsolve, m) {
    m.doc() = "Mean field game solver: Fokker-Planck, Hamilton-Jacobi and coupled solves on a periodic grid.";

    py::class_<DomainSpec>(m, "Domain")
        .def_readonly("dim", &DomainSpec::dim)
        .def_readonly("half_width", &DomainSpec::half_width)
        .def_readonly("points", &DomainSpec::points)
        .def_readonly("horizon", &DomainSpec::horizon)
        .def_readonly("time_steps", &DomainSpec::time_steps)
        .def_readonly("nu", &DomainSpec::nu)
        .def_property_readonly("dx", &DomainSpec::dx)
        .def_property_readonly("dt", &DomainSpec::dt);

    py::class_<SolverConfig>(m, "Config")
        .def_readonly("domain", &SolverConfig::domain)
        .def_readonly("hamiltonian", &SolverConfig::hamiltonian_name)
        .def_readonly("lagrangian", &SolverConfig::lagrangian_name)
        .def_readonly("g", &SolverConfig::g_name)
        .def_readonly("g0", &SolverConfig::g0_name)
        .def_readonly("hypotheses", &SolverConfig::hypotheses)
        .def_property_readonly("rho0", [](const SolverConfig& c) {
            const ScalarField& f = c.problem.rho0;
            std::vector<py::ssize_t> shape(f.domain().dim, f.domain().points);
            return Array(shape, f.values().data());
        });

    m.def("parse_config", &config_from, py::arg("text"),
          "Parse INI text. Raises ValueError listing every violation.");
    m.def(
        "load_config",
        [](const std::filesystem::path& path) {
            std::ifstream in(path);
            if (!in) throw py::value_error("cannot open config file '" + path.string() + "'");
            std::stringstream ss;
            ss << in.rdbuf();
            return config_from(ss.str());
        },
        py::arg("path"));

    m.def(
        "solve_fp",
        [](const SolverConfig& c, std::optional<Array> u, const std::string& scheme) {
            const VectorTrajectory ctl = control_or_drift(c, u);
            py::gil_scoped_release release;
            FpTrajectory t = scheme == "mild" ? solve_fp_mild(c.problem.rho0, ctl, c.options.fp)
                                              : solve_fp(c.problem.rho0, ctl, c.options.fp);
            py::gil_scoped_acquire acquire;
            return stack(t.slices);
        },
        py::arg("config"), py::arg("control") = py::none(), py::arg("scheme") = "fd",
        "Density trajectory under a control of shape (time_steps + 1, dim, points[, points]); "
        "the configured constant drift when control is None.");

    m.def(
        "solve_hjb",
        [](const SolverConfig& c, const Array& eta, const Array& eta0, const std::string& scheme) {
            ScalarTrajectory src = make_scalar_trajectory(c.domain);
            if (static_cast<std::size_t>(eta.size()) != src.size() * c.domain.cells() ||
                static_cast<std::size_t>(eta0.size()) != c.domain.cells())
                throw py::value_error("eta must hold time_steps + 1 slices and eta0 one slice");
            for (std::size_t k = 0; k < src.size(); ++k)
                std::copy(eta.data() + k * c.domain.cells(), eta.data() + (k + 1) * c.domain.cells(),
                          src[k].values().begin());
            ScalarField terminal(c.domain, std::vector<double>(eta0.data(), eta0.data() + eta0.size()));
            HjbTrajectory p = scheme == "fd" ? solve_hjb_fd(src, terminal, *c.problem.hamiltonian, c.options.hjb)
                                             : solve_hjb(src, terminal, *c.problem.hamiltonian, c.options.hjb);
            py::dict out;
            out["p"] = stack(p.p);
            out["grad_p"] = stack(p.grad_p);
            out["slab_T"] = p.diagnostics.slab_T;
            out["max_ratio"] = p.diagnostics.max_ratio;
            out["fixed_point_residual"] = p.diagnostics.fixed_point_residual;
            return out;
        },
        py::arg("config"), py::arg("eta"), py::arg("eta0"), py::arg("scheme") = "mild",
        "Backward solve of p_t + nu lap p + H(grad p) = eta with p(T) = -eta0.");

    m.def(
        "solve_mfg",
        [](const SolverConfig& c) {
            MfgState s;
            {
                py::gil_scoped_release release;
                s = solve_mfg(c.problem, c.options);
            }
            py::dict out;
            out["rho"] = stack(s.rho.slices);
            out["p"] = stack(s.p.p);
            out["u"] = stack(s.u);
            out["eta"] = stack(s.eta);
            out["status"] = s.status;
            out["converged"] = s.converged;
            out["iterations"] = s.outer_iterations;
            out["cost"] = s.cost;
            out["residuals"] = residuals(optimality_residual(s, c.problem, c.options));
            py::list history;
            for (const auto& h : s.history) {
                py::dict r = residuals(h.residuals);
                r["level"] = h.level;
                r["eps"] = h.eps;
                r["theta"] = h.theta;
                r["cost"] = h.cost;
                history.append(r);
            }
            out["history"] = history;
            return out;
        },
        py::arg("config"));

    m.def(
        "simulate_particles",
        [](const SolverConfig& c, std::optional<Array> u, std::optional<std::size_t> n,
           std::optional<std::uint64_t> seed) {
            const VectorTrajectory ctl = control_or_drift(c, u);
            const double D = HeatKernelSpec{c.domain.nu, c.problem.convention}.diffusivity();
            ParticleRun run;
            DistanceProfile d;
            {
                py::gil_scoped_release release;
                run = simulate_particles(
                    sample_ensemble(c.problem.rho0, n.value_or(c.run.particles), seed.value_or(c.run.seed)), ctl, D);
                d = compare_fp(run, solve_fp(c.problem.rho0, ctl, c.options.fp));
            }
            py::dict out;
            out["times"] = d.times;
            out["distance"] = d.distance;
            out["max"] = d.max;
            out["plateau"] = d.plateau;
            out["density"] = stack(ScalarTrajectory(run.densities));
            out["generator"] = run.generator;
            out["seed"] = run.seed;
            return out;
        },
        py::arg("config"), py::arg("control") = py::none(), py::arg("particles") = py::none(),
        py::arg("seed") = py::none());

    m.def(
        "verify",
        [](const std::vector<int>& ids) {
            std::vector<CriterionResult> results;
            {
                py::gil_scoped_release release;
                results = run_verification(ids);
            }
            py::list out;
            for (const auto& r : results) {
                py::dict d;
                d["id"] = r.id;
                d["name"] = r.name;
                d["passed"] = r.passed;
                d["measured"] = r.measured;
                d["values"] = r.values;
                out.append(d);
            }
            return out;
        },
        py::arg("ids") = std::vector<int>{});

    m.def("presets", &preset_names);
    m.def(
        "conjugate",
        [](const std::string& name, const Parameters& params, double v) {
            return conjugate_eval(*make_integrand(name, params), v, 50.0, 4001);
        },
        py::arg("name"), py::arg("params"), py::arg("v"));
    m.def(
        "yosida_value",
        [](const std::string& name, const Parameters& params, double eps, double q) {
            return yosida_value(*make_integrand(name, params), eps, q);
        },
        py::arg("name"), py::arg("params"), py::arg("eps"), py::arg("q"));
    m.def(
        "yosida_grad",
        [](const std::string& name, const Parameters& params, double eps, double q) {
            return yosida_grad(*make_integrand(name, params), eps, q);
        },
        py::arg("name"), py::arg("params"), py::arg("eps"), py::arg("q"));
    m.def(
        "fenchel_residual",
        [](const std::string& name, const Parameters& params, double u, double eta) {
            return fenchel_residual(*make_integrand(name, params), u, eta);
        },
        py::arg("name"), py::arg("params"), py::arg("u"), py::arg("eta"));
}
