#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mfg/grid.hpp"

namespace mfg {

/// Header of the binary dump: 8-byte magic "MFGFLD01", then uint32 d, N,
/// N_T, slice index and a double half width (32 bytes in total), followed
/// by N^d little-endian doubles in the lattice order of ScalarField.
struct FieldHeader {
    std::uint32_t dim = 1;
    std::uint32_t points = 0;
    std::uint32_t time_steps = 0;
    std::uint32_t slice = 0;
    double half_width = 0.0;
};

struct BinaryField {
    FieldHeader header;
    std::vector<double> values;
};

void write_binary(const ScalarField& f, const std::filesystem::path& path);
BinaryField read_binary(const std::filesystem::path& path);

/// Reads a binary dump and checks it against the expected domain.
ScalarField read_binary_field(const std::filesystem::path& path, const DomainSpec& domain);

/// CSV with header "x,value" (d = 1) or "x,y,value" (d = 2), values printed
/// with 17 significant digits.
void write_csv(const ScalarField& f, const std::filesystem::path& path);
ScalarField read_csv(const std::filesystem::path& path, const DomainSpec& domain);

/// Dumps every slice of a trajectory as <stem>_<k>.csv and <stem>_<k>.bin.
void write_trajectory(const ScalarTrajectory& traj, const std::filesystem::path& dir, const std::string& stem,
                      int cadence = 1);
/// Vector trajectories go to one file set per component: <stem>_x, <stem>_y.
void write_trajectory(const VectorTrajectory& traj, const std::filesystem::path& dir, const std::string& stem,
                      int cadence = 1);

}  // namespace mfg
