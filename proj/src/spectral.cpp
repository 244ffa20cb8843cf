#include "mfg/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace mfg {

namespace {

// The FFTW planner is not thread-safe; execution of existing plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

constexpr unsigned kPlanFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

}  // namespace

Spectral::Spectral(const DomainSpec& domain) : domain_(domain) {
    const int n = domain.points;
    const double dx = domain.dx();
    const double base = std::numbers::pi / domain.half_width;  // 2 pi / period
    auto wave = [&](int j) { return base * (j <= n / 2 ? j : j - n); };

    std::vector<double> in(domain.cells(), 0.0);
    if (domain.dim == 1) {
        modes_ = n / 2 + 1;
    } else {
        modes_ = static_cast<std::size_t>(n) * (n / 2 + 1);
    }
    std::vector<Complex> out(modes_);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        auto* cin = reinterpret_cast<fftw_complex*>(out.data());
        if (domain.dim == 1) {
            forward_plan_ = fftw_plan_dft_r2c_1d(n, in.data(), cin, kPlanFlags);
            inverse_plan_ = fftw_plan_dft_c2r_1d(n, cin, in.data(), kPlanFlags);
        } else {
            // Slow index is axis 1 (rows), fast index axis 0.
            forward_plan_ = fftw_plan_dft_r2c_2d(n, n, in.data(), cin, kPlanFlags);
            inverse_plan_ = fftw_plan_dft_c2r_2d(n, n, cin, in.data(), kPlanFlags);
        }
    }
    if (!forward_plan_ || !inverse_plan_) throw std::runtime_error("FFTW plan creation failed");

    k2_.resize(modes_);
    lap_.resize(modes_);
    k_[0].assign(modes_, 0.0);
    k_[1].assign(modes_, 0.0);
    const int half = n / 2 + 1;
    auto sym = [&](double k) {
        const double s = std::sin(0.5 * k * dx);
        return 4.0 / (dx * dx) * s * s;
    };
    for (std::size_t m = 0; m < modes_; ++m) {
        const int j0 = static_cast<int>(m % half);  // r2c: last axis is halved
        const int j1 = static_cast<int>(m / half);
        const double k0 = wave(j0);
        const double k1 = domain.dim == 2 ? wave(j1) : 0.0;
        k2_[m] = k0 * k0 + k1 * k1;
        lap_[m] = sym(k0) + (domain.dim == 2 ? sym(k1) : 0.0);
        k_[0][m] = (j0 == n / 2) ? 0.0 : k0;
        if (domain.dim == 2) k_[1][m] = (j1 == n / 2) ? 0.0 : k1;
    }
}

Spectral::~Spectral() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    if (inverse_plan_) fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void Spectral::forward(std::span<const double> in, std::vector<Complex>& out) const {
    out.resize(modes_);
    // r2c leaves its input intact for out-of-place transforms.
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
}

void Spectral::inverse(const std::vector<Complex>& in, std::span<double> out) const {
    std::vector<Complex> scratch = in;  // c2r destroys its input
    fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), reinterpret_cast<fftw_complex*>(scratch.data()),
                         out.data());
    const double scale = 1.0 / static_cast<double>(domain_.cells());
    for (double& v : out) v *= scale;
}

std::shared_ptr<const Spectral> spectral_for(const DomainSpec& domain) {
    static std::mutex m;
    static std::map<std::tuple<int, int, double>, std::shared_ptr<const Spectral>> cache;
    std::lock_guard<std::mutex> lock(m);
    auto key = std::make_tuple(domain.dim, domain.points, domain.half_width);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto s = std::make_shared<const Spectral>(domain);
    cache.emplace(key, s);
    return s;
}

ScalarField heat_kernel_field(const HeatKernelSpec& spec, double t, const DomainSpec& domain) {
    if (!(t > 0.0)) throw std::invalid_argument("heat kernel requires t > 0");
    return gaussian_field(domain, spec.variance(t), 1.0);
}

ScalarField heat_convolve(const ScalarField& f, const HeatKernelSpec& spec, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("heat_convolve requires t > 0");
    auto sp = spectral_for(f.domain());
    std::vector<Complex> hat;
    sp->forward(f.span(), hat);
    const double dt = spec.diffusivity() * t;
    const auto& k2 = sp->k_squared();
    for (std::size_t m = 1; m < hat.size(); ++m) hat[m] *= std::exp(-dt * k2[m]);
    ScalarField out(f.domain(), 0.0, f.time_index());
    sp->inverse(hat, out.values());
    return out;
}

VectorField grad_heat_convolve(const ScalarField& f, const HeatKernelSpec& spec, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("grad_heat_convolve requires t > 0");
    auto sp = spectral_for(f.domain());
    std::vector<Complex> hat, dhat;
    sp->forward(f.span(), hat);
    const double dt = spec.diffusivity() * t;
    const auto& k2 = sp->k_squared();
    for (std::size_t m = 0; m < hat.size(); ++m) hat[m] *= std::exp(-dt * k2[m]);
    VectorField out(f.domain(), 0.0, f.time_index());
    for (int a = 0; a < f.domain().dim; ++a) {
        const auto& k = sp->wavenumber(a);
        dhat.resize(hat.size());
        for (std::size_t m = 0; m < hat.size(); ++m) dhat[m] = Complex(0.0, k[m]) * hat[m];
        sp->inverse(dhat, out.component(a));
    }
    return out;
}

VectorField spectral_gradient(const ScalarField& f) {
    auto sp = spectral_for(f.domain());
    std::vector<Complex> hat, dhat;
    sp->forward(f.span(), hat);
    VectorField out(f.domain(), 0.0, f.time_index());
    for (int a = 0; a < f.domain().dim; ++a) {
        const auto& k = sp->wavenumber(a);
        dhat.resize(hat.size());
        for (std::size_t m = 0; m < hat.size(); ++m) dhat[m] = Complex(0.0, k[m]) * hat[m];
        sp->inverse(dhat, out.component(a));
    }
    return out;
}

ScalarField implicit_diffusion(const ScalarField& f, double diffusivity, double dt) {
    auto sp = spectral_for(f.domain());
    std::vector<Complex> hat;
    sp->forward(f.span(), hat);
    const auto& lap = sp->discrete_laplacian();
    for (std::size_t m = 1; m < hat.size(); ++m) hat[m] /= 1.0 + diffusivity * dt * lap[m];
    ScalarField out(f.domain(), 0.0, f.time_index());
    sp->inverse(hat, out.values());
    return out;
}

EtdWeights etd_weights(double lambda, double h) {
    const double z = lambda * h;
    double phi1, psi;
    if (z < 0.1) {
        // phi1 = int_0^1 e^{-z s} ds, psi = int_0^1 s e^{-z s} ds
        phi1 = 0.0;
        psi = 0.0;
        double term = 1.0;  // (-z)^j / j!
        for (int j = 0; j < 16; ++j) {
            phi1 += term / (j + 1);
            psi += term / (j + 2);
            term *= -z / (j + 1);
        }
    } else {
        const double e = std::exp(-z);
        phi1 = -std::expm1(-z) / z;
        psi = (1.0 - e - z * e) / (z * z);
    }
    return {std::exp(-z), h * (phi1 - psi), h * psi};
}

double measure_gradient_kernel_constant(const HeatKernelSpec& spec, const DomainSpec& domain,
                                        std::span<const double> times) {
    ScalarField delta = delta_field(domain);
    double worst = 0.0;
    for (double t : times) {
        VectorField g = grad_heat_convolve(delta, spec, t);
        worst = std::max(worst, lp_norm(g, 1.0) * std::sqrt(t));
    }
    return worst;
}

}  // namespace mfg
