#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mfg {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

using Vec = std::vector<double>;
using Parameters = std::map<std::string, double>;

/// Raised when a convex-analysis operation has no finite answer
/// (diverging conjugate, empty subdifferential, non-monotone samples).
class ConvexError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Location in the space-time lattice. Integrands with (t,x)-dependent
/// parameters read their coefficients at this index.
struct SpaceTimeIndex {
    std::size_t step = 0;
    std::size_t cell = 0;
};

/// A maximal monotone graph on the real line: a nondecreasing single-valued
/// branch plus a sorted list of jumps where the graph is the full vertical
/// segment [left, right].
class MonotoneGraph1D {
public:
    struct Jump {
        double location;
        double left;
        double right;
    };

    MonotoneGraph1D(std::function<double(double)> branch, std::vector<Jump> jumps = {});

    /// Value of the branch. At a jump location this returns the midpoint of
    /// the segment; use interval() for the full set.
    double branch(double q) const;

    /// The set graph(q) as a closed interval [lo, hi].
    std::pair<double, double> interval(double q) const;

    bool contains(double q, double eta, double tol = 0.0) const;
    const std::vector<Jump>& jumps() const { return jumps_; }
    bool single_valued() const { return jumps_.empty(); }

private:
    std::function<double(double)> branch_;
    std::vector<Jump> jumps_;
};

enum class SelectionRule { MinimalNorm, GivenDirection };

struct SubgradientSelection {
    Vec value;
    bool is_unique = true;
};

/// An extended-real convex function of a scalar or vector argument.
///
/// The base class supplies numeric fallbacks (one-sided directional
/// derivatives, lattice conjugates). Presets override the analytic hooks so
/// that solver hot paths never go through the numeric route.
class ConvexIntegrand {
public:
    ConvexIntegrand(std::string name, Parameters params);
    virtual ~ConvexIntegrand() = default;

    const std::string& name() const { return name_; }
    const Parameters& parameters() const { return params_; }
    double parameter(const std::string& key) const;

    virtual double value(std::span<const double> u) const = 0;
    double value(double r) const { return value(std::span<const double>(&r, 1)); }

    /// Evaluation at a lattice point; homogeneous presets ignore the index.
    virtual double value_at(SpaceTimeIndex, std::span<const double> u) const { return value(u); }

    /// Radius of the effective domain (+inf when the domain is everything).
    virtual double domain_radius() const { return kInfinity; }

    /// Global Lipschitz constant, +inf when not Lipschitz.
    virtual double lipschitz_constant() const { return kInfinity; }

    virtual bool strictly_convex() const { return false; }

    /// Exponent p with f(u) ~ |u|^p at infinity, when known in closed form.
    /// Used by the hypothesis envelope checks on coupling presets.
    virtual std::optional<double> growth_exponent() const { return std::nullopt; }

    /// f'(u; v). Default is a one-sided difference quotient.
    virtual double directional_derivative(std::span<const double> u, std::span<const double> v) const;

    virtual std::optional<double> analytic_conjugate(std::span<const double>) const { return std::nullopt; }

    virtual std::optional<SubgradientSelection> analytic_subgradient(std::span<const double>, SelectionRule,
                                                                     std::span<const double>) const {
        return std::nullopt;
    }

    /// Subdifferential of a scalar integrand as a monotone graph.
    virtual std::optional<MonotoneGraph1D> subdifferential_graph() const { return std::nullopt; }

    /// Closed form of (I + eps d f)^{-1} q for scalar integrands.
    virtual std::optional<double> analytic_resolvent(double, double) const { return std::nullopt; }

    /// The convex conjugate as another integrand, when the pair is known in
    /// closed form (ball-indicator <-> norm, ...). Null otherwise.
    virtual std::shared_ptr<const ConvexIntegrand> conjugate_partner() const { return nullptr; }

private:
    std::string name_;
    Parameters params_;
};

using IntegrandPtr = std::shared_ptr<const ConvexIntegrand>;

/// sup_u { u.v - f(u) }. Analytic when the preset supplies it; otherwise a
/// lattice search over [-R, R]^d refined by one golden-section pass per axis.
double conjugate_eval(const ConvexIntegrand& f, std::span<const double> v, double search_radius,
                      int search_resolution);
double conjugate_eval(const ConvexIntegrand& f, double v, double search_radius, int search_resolution);

/// The lattice route of conjugate_eval, never short-circuited by the analytic hook.
double conjugate_lattice(const ConvexIntegrand& f, std::span<const double> v, double search_radius,
                         int search_resolution);

SubgradientSelection subdiff_select(const ConvexIntegrand& f, std::span<const double> u,
                                    SelectionRule rule = SelectionRule::MinimalNorm,
                                    std::span<const double> direction = {});

/// f(u) + f*(eta) - u.eta. Nonnegative; zero iff eta is a subgradient at u.
double fenchel_residual(const ConvexIntegrand& f, std::span<const double> u, std::span<const double> eta);
double fenchel_residual(const ConvexIntegrand& f, double u, double eta);

struct ResolventPoint {
    double point;  ///< r = (I + eps G)^{-1} q
    double slope;  ///< s in G(r) with r + eps s = q
};

/// Resolvent of a monotone graph by bisection on r -> r + eps G(r), jumps
/// treated as vertical segments.
ResolventPoint resolve(const MonotoneGraph1D& graph, double eps, double q);
double resolvent(const MonotoneGraph1D& graph, double eps, double q);

/// Resolvent of the subdifferential of a scalar integrand (analytic hook first).
ResolventPoint resolve(const ConvexIntegrand& g, double eps, double q);

/// Moreau envelope g_eps(q) = min_theta |q - theta|^2 / (2 eps) + g(theta).
double yosida_value(const ConvexIntegrand& g, double eps, double q);

/// Derivative of the Moreau envelope, (q - J_eps q) / eps.
double yosida_grad(const ConvexIntegrand& g, double eps, double q);

/// Maximal monotone extension of nondecreasing samples (x sorted ascending).
/// A negative threshold selects the default 10 * spacing * local slope.
MonotoneGraph1D fill_jumps(std::span<const double> x, std::span<const double> y,
                           double jump_detection_threshold = -1.0);

/// Inverse of a monotone graph: some r with eta in G(r), or nullopt when eta
/// lies outside the range of G.
std::optional<double> graph_inverse(const MonotoneGraph1D& graph, double eta);

/// H(q) = sup_u { q.u - L(u) }. Returns the closed-form partner preset when
/// the pair is known; otherwise a lattice-conjugate wrapper of L.
IntegrandPtr hamiltonian_from_lagrangian(const IntegrandPtr& lagrangian, int search_resolution = 2001);

}  // namespace mfg
