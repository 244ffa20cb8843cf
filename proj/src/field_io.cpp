#include "mfg/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace mfg {

static_assert(std::endian::native == std::endian::little, "binary dumps assume a little-endian host");

namespace {

constexpr char kMagic[8] = {'M', 'F', 'G', 'F', 'L', 'D', '0', '1'};

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, mode);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    return out;
}

}  // namespace

void write_binary(const ScalarField& f, const std::filesystem::path& path) {
    auto out = open_out(path, std::ios::out | std::ios::binary);
    const DomainSpec& d = f.domain();
    FieldHeader h{static_cast<std::uint32_t>(d.dim), static_cast<std::uint32_t>(d.points),
                  static_cast<std::uint32_t>(d.time_steps), static_cast<std::uint32_t>(f.time_index()), d.half_width};
    out.write(kMagic, 8);
    out.write(reinterpret_cast<const char*>(&h.dim), 4);
    out.write(reinterpret_cast<const char*>(&h.points), 4);
    out.write(reinterpret_cast<const char*>(&h.time_steps), 4);
    out.write(reinterpret_cast<const char*>(&h.slice), 4);
    out.write(reinterpret_cast<const char*>(&h.half_width), 8);
    out.write(reinterpret_cast<const char*>(f.values().data()), static_cast<std::streamsize>(f.size() * sizeof(double)));
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

BinaryField read_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("'" + path.string() + "' is not a field dump");
    BinaryField b;
    in.read(reinterpret_cast<char*>(&b.header.dim), 4);
    in.read(reinterpret_cast<char*>(&b.header.points), 4);
    in.read(reinterpret_cast<char*>(&b.header.time_steps), 4);
    in.read(reinterpret_cast<char*>(&b.header.slice), 4);
    in.read(reinterpret_cast<char*>(&b.header.half_width), 8);
    if (!in || (b.header.dim != 1 && b.header.dim != 2)) throw std::runtime_error("corrupt header in '" + path.string() + "'");
    std::size_t n = b.header.points;
    if (b.header.dim == 2) n *= b.header.points;
    b.values.resize(n);
    in.read(reinterpret_cast<char*>(b.values.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw std::runtime_error("truncated payload in '" + path.string() + "'");
    return b;
}

ScalarField read_binary_field(const std::filesystem::path& path, const DomainSpec& domain) {
    BinaryField b = read_binary(path);
    if (static_cast<int>(b.header.dim) != domain.dim || static_cast<int>(b.header.points) != domain.points ||
        b.header.half_width != domain.half_width)
        throw std::runtime_error("'" + path.string() + "' does not match the configured domain");
    return ScalarField(domain, std::move(b.values), static_cast<int>(b.header.slice));
}

void write_csv(const ScalarField& f, const std::filesystem::path& path) {
    auto out = open_out(path);
    const DomainSpec& d = f.domain();
    out << (d.dim == 1 ? "x,value\n" : "x,y,value\n");
    out << std::setprecision(17);
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto x = d.position(i);
        out << x[0] << ',';
        if (d.dim == 2) out << x[1] << ',';
        out << f[i] << '\n';
    }
}

ScalarField read_csv(const std::filesystem::path& path, const DomainSpec& domain) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::string line;
    std::getline(in, line);
    ScalarField f(domain);
    std::size_t i = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (i >= f.size()) throw std::runtime_error("too many rows in '" + path.string() + "'");
        auto pos = line.find_last_of(',');
        f[i++] = std::stod(line.substr(pos + 1));
    }
    if (i != f.size()) throw std::runtime_error("too few rows in '" + path.string() + "'");
    return f;
}

namespace {

std::string slice_name(const std::string& stem, int k) {
    std::ostringstream s;
    s << stem << '_' << std::setw(5) << std::setfill('0') << k;
    return s.str();
}

}  // namespace

void write_trajectory(const ScalarTrajectory& traj, const std::filesystem::path& dir, const std::string& stem,
                      int cadence) {
    if (cadence < 1) cadence = 1;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        if (k % cadence != 0 && k + 1 != traj.size()) continue;
        const std::string base = slice_name(stem, static_cast<int>(k));
        write_csv(traj[k], dir / (base + ".csv"));
        write_binary(traj[k], dir / (base + ".bin"));
    }
}

void write_trajectory(const VectorTrajectory& traj, const std::filesystem::path& dir, const std::string& stem,
                      int cadence) {
    if (traj.empty()) return;
    static const char* suffix[2] = {"_x", "_y"};
    for (int a = 0; a < traj.front().dim(); ++a) {
        ScalarTrajectory comp;
        comp.reserve(traj.size());
        for (const auto& v : traj) comp.emplace_back(v.domain(), v.component(a), v.time_index());
        write_trajectory(comp, dir, stem + suffix[a], cadence);
    }
}

}  // namespace mfg
