#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace mfg {

/// Periodic box [-L, L)^d sampled at N points per axis, with a uniform time
/// grid of N_T steps on [0, T].
struct DomainSpec {
    int dim = 1;
    double half_width = 10.0;
    int points = 128;
    double horizon = 1.0;
    int time_steps = 64;
    double nu = 0.5;

    double dx() const { return 2.0 * half_width / points; }
    double dt() const { return horizon / time_steps; }
    std::size_t cells() const { return dim == 1 ? points : static_cast<std::size_t>(points) * points; }
    double cell_volume() const;
    double measure() const;
    double coordinate(int i) const { return -half_width + i * dx(); }

    /// Coordinates of a flat cell index. Layout is row-major with axis 0
    /// varying fastest: flat = i0 + N * i1.
    std::array<double, 2> position(std::size_t flat) const;

    /// Throws std::invalid_argument listing the first violated bound.
    void validate() const;

    bool same_space(const DomainSpec& other) const {
        return dim == other.dim && points == other.points && half_width == other.half_width;
    }
};

class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const DomainSpec& domain, double fill = 0.0, int time_index = 0);
    ScalarField(const DomainSpec& domain, std::vector<double> values, int time_index = 0);

    const DomainSpec& domain() const { return domain_; }
    int time_index() const { return time_index_; }
    void set_time_index(int k) { time_index_ = k; }

    std::size_t size() const { return values_.size(); }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }
    std::span<const double> span() const { return values_; }

    double mass() const;
    double min() const;
    double max() const;
    bool all_finite() const;
    bool nonnegative(double floor = 0.0) const;

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double s);

private:
    DomainSpec domain_;
    std::vector<double> values_;
    int time_index_ = 0;
};

class VectorField {
public:
    VectorField() = default;
    explicit VectorField(const DomainSpec& domain, double fill = 0.0, int time_index = 0);

    const DomainSpec& domain() const { return domain_; }
    int dim() const { return domain_.dim; }
    int time_index() const { return time_index_; }
    void set_time_index(int k) { time_index_ = k; }

    std::vector<double>& component(int a) { return components_[a]; }
    const std::vector<double>& component(int a) const { return components_[a]; }
    std::size_t size() const { return domain_.cells(); }

    /// Vector at one cell (unused trailing component is zero in d = 1).
    std::array<double, 2> at(std::size_t cell) const;
    void set(std::size_t cell, std::span<const double> v);

    /// Pointwise Euclidean magnitude.
    ScalarField magnitude() const;
    double sup_norm() const;
    bool all_finite() const;

    VectorField& operator+=(const VectorField& o);
    VectorField& operator-=(const VectorField& o);
    VectorField& operator*=(double s);

private:
    DomainSpec domain_;
    std::vector<std::vector<double>> components_;
    int time_index_ = 0;
};

/// Flat index of the periodic neighbor at offset `shift` along `axis`.
inline std::size_t periodic_neighbor(const DomainSpec& d, std::size_t flat, int axis, int shift) {
    const int n = d.points;
    const int i0 = static_cast<int>(flat % n);
    const int i1 = static_cast<int>(flat / n);
    if (axis == 0) return static_cast<std::size_t>(i1) * n + ((i0 + shift % n + n) % n);
    return static_cast<std::size_t>((i1 + shift % n + n) % n) * n + i0;
}

using ScalarTrajectory = std::vector<ScalarField>;
using VectorTrajectory = std::vector<VectorField>;

ScalarTrajectory make_scalar_trajectory(const DomainSpec& domain, double fill = 0.0);
VectorTrajectory make_vector_trajectory(const DomainSpec& domain, double fill = 0.0);

/// Riemann-sum L^m norm with cell weight dx^d; m = +inf gives the sup norm.
double lp_norm(const ScalarField& f, double m);
double lp_norm(const VectorField& v, double m);

/// Space-time L^1 norm with trapezoid weights in time.
double l1_space_time(const ScalarTrajectory& f);
double l1_space_time(const VectorTrajectory& v);
double l1_space_time_distance(const ScalarTrajectory& a, const ScalarTrajectory& b);
double l1_space_time_distance(const VectorTrajectory& a, const VectorTrajectory& b);

double l1_distance(const ScalarField& a, const ScalarField& b);
double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField& a, const VectorField& b);

/// Centered differences on the periodic lattice; divergence is minus the
/// adjoint of gradient under the lattice inner product.
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);

/// Fraction of the mass lying in the outer band of relative width 0.1.
double boundary_mass_fraction(const ScalarField& f);

/// Gaussian with the given per-axis variance and mass, centered at `center`,
/// sampled with periodic images.
ScalarField gaussian_field(const DomainSpec& domain, double variance, double mass = 1.0,
                           std::array<double, 2> center = {0.0, 0.0});

/// Grid delta of unit mass at the cell nearest to `at`.
ScalarField delta_field(const DomainSpec& domain, std::array<double, 2> at = {0.0, 0.0}, double mass = 1.0);

}  // namespace mfg
