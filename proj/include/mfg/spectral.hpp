#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "mfg/grid.hpp"

namespace mfg {

using Complex = std::complex<double>;

/// Real-to-complex transforms on the periodic lattice of a domain, with the
/// per-mode symbols used by the solvers. Instances are immutable after
/// construction and shared through spectral_for().
class Spectral {
public:
    explicit Spectral(const DomainSpec& domain);
    ~Spectral();
    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;

    const DomainSpec& domain() const { return domain_; }
    std::size_t modes() const { return modes_; }

    void forward(std::span<const double> in, std::vector<Complex>& out) const;
    /// Inverse transform including the 1/N^d normalization.
    void inverse(const std::vector<Complex>& in, std::span<double> out) const;

    /// |k|^2 of the continuous Laplacian.
    const std::vector<double>& k_squared() const { return k2_; }
    /// Symbol of the 3-point (per axis) discrete Laplacian, sum 4/dx^2 sin^2(k dx/2).
    const std::vector<double>& discrete_laplacian() const { return lap_; }
    /// Wavenumber along an axis, with the Nyquist mode set to zero so that
    /// spectral derivatives of real fields stay real.
    const std::vector<double>& wavenumber(int axis) const { return k_[axis]; }

private:
    DomainSpec domain_;
    std::size_t modes_ = 0;
    void* forward_plan_ = nullptr;
    void* inverse_plan_ = nullptr;
    std::vector<double> k2_, lap_;
    std::vector<double> k_[2];
};

std::shared_ptr<const Spectral> spectral_for(const DomainSpec& domain);

enum class KernelConvention { OperatorConsistent, SquaredNu };

struct HeatKernelSpec {
    double nu = 0.5;
    KernelConvention convention = KernelConvention::OperatorConsistent;

    /// Diffusion coefficient D of dE/dt = D lap E: nu, or nu^2 in the squared form.
    double diffusivity() const { return convention == KernelConvention::OperatorConsistent ? nu : nu * nu; }
    /// Per-axis variance 2 D t.
    double variance(double t) const { return 2.0 * diffusivity() * t; }
};

/// Periodic sum of the sampled Gaussian kernel at time t > 0.
ScalarField heat_kernel_field(const HeatKernelSpec& spec, double t, const DomainSpec& domain);

/// Circular convolution with the kernel at time t (Fourier multiplier
/// exp(-D |k|^2 t)). The zero mode is untouched, so mass is preserved.
ScalarField heat_convolve(const ScalarField& f, const HeatKernelSpec& spec, double t);

/// Convolution with the gradient of the kernel.
VectorField grad_heat_convolve(const ScalarField& f, const HeatKernelSpec& spec, double t);

/// Spectral gradient of a field (multiplier i k, Nyquist zeroed).
VectorField spectral_gradient(const ScalarField& f);

/// Backward-Euler diffusion step (I - D dt lap_h)^{-1} f with the discrete
/// Laplacian symbol.
ScalarField implicit_diffusion(const ScalarField& f, double diffusivity, double dt);

/// Exponential integrator for y' = -lambda y + f with f linear in time on a
/// step of length h: y_n = decay y_{n-1} + w_now f_n + w_prev f_{n-1}.
struct EtdWeights {
    double decay;
    double w_now;
    double w_prev;
};
EtdWeights etd_weights(double lambda, double h);

/// Measured constant w in |grad E(t) * f|_1 <= w t^{-1/2} |f|_1 for f a
/// centered delta, maximized over the sampled times.
double measure_gradient_kernel_constant(const HeatKernelSpec& spec, const DomainSpec& domain,
                                        std::span<const double> times);

}  // namespace mfg
