#include "mfg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mfg {

double DomainSpec::cell_volume() const { return std::pow(dx(), dim); }

double DomainSpec::measure() const { return std::pow(2.0 * half_width, dim); }

std::array<double, 2> DomainSpec::position(std::size_t flat) const {
    const int i0 = static_cast<int>(flat % points);
    const int i1 = static_cast<int>(flat / points);
    return {coordinate(i0), dim == 2 ? coordinate(i1) : 0.0};
}

void DomainSpec::validate() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("dimension must be 1 or 2");
    if (!(half_width > 0.0) || !std::isfinite(half_width)) throw std::invalid_argument("half width must be positive");
    if (points < 8 || (points & (points - 1)) != 0)
        throw std::invalid_argument("points per axis must be a power of two >= 8");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("time horizon must be positive");
    if (time_steps < 2) throw std::invalid_argument("time steps must be >= 2");
    if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("viscosity must be positive");
}

ScalarField::ScalarField(const DomainSpec& domain, double fill, int time_index)
    : domain_(domain), values_(domain.cells(), fill), time_index_(time_index) {}

ScalarField::ScalarField(const DomainSpec& domain, std::vector<double> values, int time_index)
    : domain_(domain), values_(std::move(values)), time_index_(time_index) {
    if (values_.size() != domain_.cells()) throw std::invalid_argument("field size does not match domain");
}

double ScalarField::mass() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s * domain_.cell_volume();
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

bool ScalarField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool ScalarField::nonnegative(double floor) const {
    return std::all_of(values_.begin(), values_.end(), [floor](double v) { return v >= floor; });
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

VectorField::VectorField(const DomainSpec& domain, double fill, int time_index)
    : domain_(domain), components_(domain.dim, std::vector<double>(domain.cells(), fill)), time_index_(time_index) {}

std::array<double, 2> VectorField::at(std::size_t cell) const {
    std::array<double, 2> v{0.0, 0.0};
    for (int a = 0; a < dim(); ++a) v[a] = components_[a][cell];
    return v;
}

void VectorField::set(std::size_t cell, std::span<const double> v) {
    for (int a = 0; a < dim(); ++a) components_[a][cell] = v[a];
}

ScalarField VectorField::magnitude() const {
    ScalarField m(domain_, 0.0, time_index_);
    for (std::size_t i = 0; i < size(); ++i) {
        double s = 0.0;
        for (int a = 0; a < dim(); ++a) s += components_[a][i] * components_[a][i];
        m[i] = std::sqrt(s);
    }
    return m;
}

double VectorField::sup_norm() const { return magnitude().max(); }

bool VectorField::all_finite() const {
    for (const auto& c : components_)
        if (!std::all_of(c.begin(), c.end(), [](double v) { return std::isfinite(v); })) return false;
    return true;
}

VectorField& VectorField::operator+=(const VectorField& o) {
    for (int a = 0; a < dim(); ++a)
        for (std::size_t i = 0; i < size(); ++i) components_[a][i] += o.components_[a][i];
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
    for (int a = 0; a < dim(); ++a)
        for (std::size_t i = 0; i < size(); ++i) components_[a][i] -= o.components_[a][i];
    return *this;
}

VectorField& VectorField::operator*=(double s) {
    for (auto& c : components_)
        for (double& v : c) v *= s;
    return *this;
}

ScalarTrajectory make_scalar_trajectory(const DomainSpec& domain, double fill) {
    ScalarTrajectory t;
    t.reserve(domain.time_steps + 1);
    for (int k = 0; k <= domain.time_steps; ++k) t.emplace_back(domain, fill, k);
    return t;
}

VectorTrajectory make_vector_trajectory(const DomainSpec& domain, double fill) {
    VectorTrajectory t;
    t.reserve(domain.time_steps + 1);
    for (int k = 0; k <= domain.time_steps; ++k) t.emplace_back(domain, fill, k);
    return t;
}

double lp_norm(const ScalarField& f, double m) {
    if (!(m >= 1.0)) throw std::invalid_argument("lp_norm requires m >= 1");
    if (std::isinf(m)) {
        double s = 0.0;
        for (double v : f.values()) s = std::max(s, std::abs(v));
        return s;
    }
    double s = 0.0;
    if (m == 1.0) {
        for (double v : f.values()) s += std::abs(v);
        return s * f.domain().cell_volume();
    }
    for (double v : f.values()) s += std::pow(std::abs(v), m);
    return std::pow(s * f.domain().cell_volume(), 1.0 / m);
}

double lp_norm(const VectorField& v, double m) { return lp_norm(v.magnitude(), m); }

namespace {

template <class Traj, class Norm>
double trapezoid(const Traj& f, Norm norm) {
    if (f.size() < 2) return 0.0;
    const double dt = f.front().domain().dt();
    double s = 0.5 * (norm(f.front()) + norm(f.back()));
    for (std::size_t k = 1; k + 1 < f.size(); ++k) s += norm(f[k]);
    return s * dt;
}

}  // namespace

double l1_space_time(const ScalarTrajectory& f) {
    return trapezoid(f, [](const ScalarField& x) { return lp_norm(x, 1.0); });
}

double l1_space_time(const VectorTrajectory& v) {
    return trapezoid(v, [](const VectorField& x) { return lp_norm(x, 1.0); });
}

double l1_distance(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s * a.domain().cell_volume();
}

double l1_space_time_distance(const ScalarTrajectory& a, const ScalarTrajectory& b) {
    if (a.size() != b.size()) throw std::invalid_argument("trajectory lengths differ");
    ScalarTrajectory diff = a;
    for (std::size_t k = 0; k < a.size(); ++k) diff[k] -= b[k];
    return l1_space_time(diff);
}

double l1_space_time_distance(const VectorTrajectory& a, const VectorTrajectory& b) {
    if (a.size() != b.size()) throw std::invalid_argument("trajectory lengths differ");
    VectorTrajectory diff = a;
    for (std::size_t k = 0; k < a.size(); ++k) diff[k] -= b[k];
    return l1_space_time(diff);
}

double inner(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * a.domain().cell_volume();
}

double inner(const VectorField& a, const VectorField& b) {
    double s = 0.0;
    for (int c = 0; c < a.dim(); ++c)
        for (std::size_t i = 0; i < a.size(); ++i) s += a.component(c)[i] * b.component(c)[i];
    return s * a.domain().cell_volume();
}


VectorField gradient(const ScalarField& f) {
    const DomainSpec& dom = f.domain();
    VectorField g(dom, 0.0, f.time_index());
    const double inv = 1.0 / (2.0 * dom.dx());
    for (int a = 0; a < dom.dim; ++a) {
        auto& c = g.component(a);
        for (std::size_t i = 0; i < f.size(); ++i)
            c[i] = (f[periodic_neighbor(dom, i, a, 1)] - f[periodic_neighbor(dom, i, a, -1)]) * inv;
    }
    return g;
}

ScalarField divergence(const VectorField& v) {
    const DomainSpec& dom = v.domain();
    ScalarField out(dom, 0.0, v.time_index());
    const double inv = 1.0 / (2.0 * dom.dx());
    for (int a = 0; a < dom.dim; ++a) {
        const auto& c = v.component(a);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] += (c[periodic_neighbor(dom, i, a, 1)] - c[periodic_neighbor(dom, i, a, -1)]) * inv;
    }
    return out;
}

double boundary_mass_fraction(const ScalarField& f) {
    const DomainSpec& dom = f.domain();
    const double inner_edge = 0.9 * dom.half_width;
    double band = 0.0, total = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto x = dom.position(i);
        const double v = std::abs(f[i]);
        total += v;
        bool outer = std::abs(x[0]) >= inner_edge || (dom.dim == 2 && std::abs(x[1]) >= inner_edge);
        if (outer) band += v;
    }
    return total > 0.0 ? band / total : 0.0;
}

ScalarField gaussian_field(const DomainSpec& domain, double variance, double mass, std::array<double, 2> center) {
    if (!(variance > 0.0)) throw std::invalid_argument("gaussian variance must be positive");
    ScalarField f(domain);
    const double period = 2.0 * domain.half_width;
    const int images = static_cast<int>(std::ceil(10.0 * std::sqrt(variance) / period)) + 1;
    const double norm = std::pow(2.0 * std::numbers::pi * variance, -0.5 * domain.dim);
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto x = domain.position(i);
        double axis_sum[2] = {0.0, 1.0};
        for (int a = 0; a < domain.dim; ++a) {
            double s = 0.0;
            for (int m = -images; m <= images; ++m) {
                const double y = x[a] - center[a] + m * period;
                s += std::exp(-y * y / (2.0 * variance));
            }
            axis_sum[a] = s;
        }
        f[i] = mass * norm * axis_sum[0] * axis_sum[1];
    }
    return f;
}

ScalarField delta_field(const DomainSpec& domain, std::array<double, 2> at, double mass) {
    ScalarField f(domain);
    const double dx = domain.dx();
    auto idx = [&](double x) {
        int i = static_cast<int>(std::lround((x + domain.half_width) / dx));
        return ((i % domain.points) + domain.points) % domain.points;
    };
    std::size_t flat = idx(at[0]);
    if (domain.dim == 2) flat += static_cast<std::size_t>(idx(at[1])) * domain.points;
    f[flat] = mass / domain.cell_volume();
    return f;
}

}  // namespace mfg
