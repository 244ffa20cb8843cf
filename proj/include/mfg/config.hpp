#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfg/coupler.hpp"

namespace mfg {

/// All violations found while loading a configuration, in file order.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const { return violations_; }

private:
    std::vector<std::string> violations_;
};

struct InitialDensity {
    std::string kind = "gaussian";  ///< gaussian | uniform
    double variance = 1.0;
    double mass = 1.0;
    std::array<double, 2> center{0.0, 0.0};
};

struct RunBlock {
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "out";
    int dump_cadence = 1;
    std::string format = "csv";  ///< csv | binary | both | none
    std::size_t particles = 200000;
    std::filesystem::path control_dir;  ///< u_x_*.bin (and u_y_*.bin) from a previous solve-mfg
};

struct SolverConfig {
    DomainSpec domain;
    double control_bound = 1.0;
    std::string hamiltonian_name;  ///< resolved preset names after partner lookup
    std::string lagrangian_name;
    std::string g_name;
    std::string g0_name;
    InitialDensity initial;
    std::array<double, 2> drift{0.0, 0.0};  ///< constant control for solve-fp
    std::string fp_scheme = "fd";            ///< fd | mild
    std::string hjb_scheme = "mild";         ///< mild | fd
    MfgOptions options;
    RunBlock run;
    MfgProblem problem;
    /// Hypothesis checks run at load: name -> satisfied. Failed checks that
    /// are not fatal (uniqueness filters) are recorded here only.
    std::map<std::string, bool> hypotheses;
};

/// Parses the INI text. Throws ConfigError listing every violation.
SolverConfig parse_config(const std::string& text);
SolverConfig load_config(const std::filesystem::path& path);

ScalarField make_initial_density(const DomainSpec& domain, const InitialDensity& spec);

}  // namespace mfg
