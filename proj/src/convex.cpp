#include "mfg/convex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mfg {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Conjugate computed on demand from a Lagrangian with bounded domain.
class LatticeConjugate final : public ConvexIntegrand {
public:
    LatticeConjugate(IntegrandPtr lagrangian, int resolution)
        : ConvexIntegrand("conjugate(" + lagrangian->name() + ")", lagrangian->parameters()),
          lagrangian_(std::move(lagrangian)),
          resolution_(resolution) {}

    double value(std::span<const double> q) const override {
        return conjugate_lattice(*lagrangian_, q, lagrangian_->domain_radius(), resolution_);
    }
    double lipschitz_constant() const override { return lagrangian_->domain_radius(); }
    std::optional<double> analytic_conjugate(std::span<const double> u) const override {
        return lagrangian_->value(u);
    }

private:
    IntegrandPtr lagrangian_;
    int resolution_;
};

}  // namespace

MonotoneGraph1D::MonotoneGraph1D(std::function<double(double)> branch, std::vector<Jump> jumps)
    : branch_(std::move(branch)), jumps_(std::move(jumps)) {
    std::sort(jumps_.begin(), jumps_.end(), [](const Jump& a, const Jump& b) { return a.location < b.location; });
    for (const auto& j : jumps_) {
        if (!(j.left <= j.right)) throw ConvexError("jump with left limit above right limit");
    }
}

double MonotoneGraph1D::branch(double q) const {
    for (const auto& j : jumps_) {
        if (j.location == q) return 0.5 * (j.left + j.right);
    }
    return branch_(q);
}

std::pair<double, double> MonotoneGraph1D::interval(double q) const {
    for (const auto& j : jumps_) {
        if (j.location == q) return {j.left, j.right};
    }
    double b = branch_(q);
    return {b, b};
}

bool MonotoneGraph1D::contains(double q, double eta, double tol) const {
    auto [lo, hi] = interval(q);
    return eta >= lo - tol && eta <= hi + tol;
}

ConvexIntegrand::ConvexIntegrand(std::string name, Parameters params)
    : name_(std::move(name)), params_(std::move(params)) {}

double ConvexIntegrand::parameter(const std::string& key) const {
    auto it = params_.find(key);
    if (it == params_.end()) throw std::out_of_range("integrand '" + name_ + "' has no parameter '" + key + "'");
    return it->second;
}

double ConvexIntegrand::directional_derivative(std::span<const double> u, std::span<const double> v) const {
    const double fu = value(u);
    if (!std::isfinite(fu)) return kInfinity;
    const double h = 1e-7 * std::max(1.0, norm2(u));
    Vec w(u.begin(), u.end());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += h * v[i];
    const double fw = value(w);
    if (!std::isfinite(fw)) return kInfinity;
    return (fw - fu) / h;
}

double conjugate_lattice(const ConvexIntegrand& f, std::span<const double> v, double search_radius,
                         int search_resolution) {
    if (search_resolution < 3) throw std::invalid_argument("conjugate search resolution must be at least 3");
    if (!(search_radius > 0.0) || !std::isfinite(search_radius))
        throw std::invalid_argument("conjugate search radius must be positive and finite");
    const double dom = f.domain_radius();
    if (std::isfinite(dom) && search_radius < dom * (1.0 - 1e-12))
        throw std::invalid_argument("conjugate search radius below the effective domain radius");
    const std::size_t d = v.size();
    if (d < 1 || d > 2) throw std::invalid_argument("conjugate lattice supports d = 1 or 2");

    const int n = search_resolution;
    const double h = 2.0 * search_radius / (n - 1);
    auto objective = [&](std::span<const double> u) {
        const double fu = f.value(u);
        return std::isfinite(fu) ? dot(u, v) - fu : -kInfinity;
    };

    double best = -kInfinity;
    Vec best_u(d, 0.0);
    Vec u(d);
    std::vector<int> best_idx(d, 0);
    const int ny = d == 2 ? n : 1;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < n; ++i) {
            u[0] = -search_radius + i * h;
            if (d == 2) u[1] = -search_radius + j * h;
            const double val = objective(u);
            if (val > best) {
                best = val;
                best_u = u;
                best_idx[0] = i;
                if (d == 2) best_idx[1] = j;
            }
        }
    }
    if (best == -kInfinity) throw ConvexError("conjugate undefined: integrand is +inf on the search lattice");
    if (!std::isfinite(dom)) {
        for (int idx : best_idx) {
            if (idx == 0 || idx == n - 1) throw ConvexError("conjugate diverges");
        }
    }

    // One golden-section pass per axis around the lattice maximizer.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (std::size_t axis = 0; axis < d; ++axis) {
        double lo = std::max(-search_radius, best_u[axis] - h);
        double hi = std::min(search_radius, best_u[axis] + h);
        Vec w = best_u;
        auto phi = [&](double s) {
            w[axis] = s;
            return objective(w);
        };
        double a = hi - inv_phi * (hi - lo);
        double b = lo + inv_phi * (hi - lo);
        double fa = phi(a), fb = phi(b);
        for (int it = 0; it < 80; ++it) {
            if (fa < fb) {
                lo = a;
                a = b;
                fa = fb;
                b = lo + inv_phi * (hi - lo);
                fb = phi(b);
            } else {
                hi = b;
                b = a;
                fb = fa;
                a = hi - inv_phi * (hi - lo);
                fa = phi(a);
            }
        }
        const double s = 0.5 * (lo + hi);
        const double fs = phi(s);
        if (fs > best) {
            best = fs;
            best_u[axis] = s;
        }
    }
    return best;
}

double conjugate_eval(const ConvexIntegrand& f, std::span<const double> v, double search_radius,
                      int search_resolution) {
    if (auto c = f.analytic_conjugate(v)) return *c;
    return conjugate_lattice(f, v, search_radius, search_resolution);
}

double conjugate_eval(const ConvexIntegrand& f, double v, double search_radius, int search_resolution) {
    return conjugate_eval(f, std::span<const double>(&v, 1), search_radius, search_resolution);
}

SubgradientSelection subdiff_select(const ConvexIntegrand& f, std::span<const double> u, SelectionRule rule,
                                    std::span<const double> direction) {
    if (!std::isfinite(f.value(u))) throw ConvexError("empty subdifferential: point outside the effective domain");
    if (auto s = f.analytic_subgradient(u, rule, direction)) return *s;

    const std::size_t d = u.size();
    SubgradientSelection out;
    out.value.assign(d, 0.0);
    Vec e(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        e[i] = 1.0;
        const double hi = f.directional_derivative(u, e);
        e[i] = -1.0;
        const double lo = -f.directional_derivative(u, e);
        e[i] = 0.0;
        const double tol = 1e-5 * (1.0 + std::abs(lo) + std::abs(hi));
        if (std::isfinite(lo) && std::isfinite(hi) && std::abs(hi - lo) <= tol) {
            out.value[i] = 0.5 * (lo + hi);
            continue;
        }
        out.is_unique = false;
        double pick = std::clamp(0.0, std::min(lo, hi), std::max(lo, hi));
        if (rule == SelectionRule::GivenDirection && i < direction.size()) {
            if (direction[i] > 0.0) pick = hi;
            if (direction[i] < 0.0) pick = lo;
        }
        if (!std::isfinite(pick)) throw ConvexError("empty subdifferential: no finite selection");
        out.value[i] = pick;
    }
    return out;
}

double fenchel_residual(const ConvexIntegrand& f, std::span<const double> u, std::span<const double> eta) {
    const double fu = f.value(u);
    if (!std::isfinite(fu)) throw ConvexError("fenchel residual requires f(u) finite");
    double conj;
    if (auto c = f.analytic_conjugate(eta)) {
        conj = *c;
    } else {
        const double dom = f.domain_radius();
        const double radius = std::isfinite(dom) ? dom : std::max(10.0, 4.0 * (norm2(u) + norm2(eta)));
        conj = conjugate_lattice(f, eta, radius, u.size() == 1 ? 20001 : 401);
    }
    if (!std::isfinite(conj)) return kInfinity;
    return fu + conj - dot(u, eta);
}

double fenchel_residual(const ConvexIntegrand& f, double u, double eta) {
    return fenchel_residual(f, std::span<const double>(&u, 1), std::span<const double>(&eta, 1));
}

ResolventPoint resolve(const MonotoneGraph1D& graph, double eps, double q) {
    if (!(eps > 0.0)) throw std::invalid_argument("resolvent requires eps > 0");
    for (const auto& j : graph.jumps()) {
        const double lo = j.location + eps * j.left;
        const double hi = j.location + eps * j.right;
        if (q >= lo && q <= hi) return {j.location, std::clamp((q - j.location) / eps, j.left, j.right)};
    }
    auto m = [&](double r) { return r + eps * graph.branch(r); };

    double lo = q, hi = q;
    double step = 1.0 + std::abs(q);
    int guard = 0;
    while (!(m(lo) <= q)) {
        lo -= step;
        step *= 2.0;
        if (++guard > 2000 || !std::isfinite(lo)) throw ConvexError("resolvent bracket failure: graph not maximal monotone");
    }
    step = 1.0 + std::abs(q);
    guard = 0;
    while (!(m(hi) >= q)) {
        hi += step;
        step *= 2.0;
        if (++guard > 2000 || !std::isfinite(hi)) throw ConvexError("resolvent bracket failure: graph not maximal monotone");
    }
    for (int it = 0; it < 2200; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        if (m(mid) < q)
            lo = mid;
        else
            hi = mid;
    }
    const double r = (q - m(lo) <= m(hi) - q) ? lo : hi;
    return {r, (q - r) / eps};
}

double resolvent(const MonotoneGraph1D& graph, double eps, double q) { return resolve(graph, eps, q).point; }

ResolventPoint resolve(const ConvexIntegrand& g, double eps, double q) {
    if (!(eps > 0.0)) throw std::invalid_argument("resolvent requires eps > 0");
    if (auto r = g.analytic_resolvent(eps, q)) return {*r, (q - *r) / eps};
    auto graph = g.subdifferential_graph();
    if (!graph) throw ConvexError("integrand '" + g.name() + "' has no scalar subdifferential graph");
    return resolve(*graph, eps, q);
}

double yosida_value(const ConvexIntegrand& g, double eps, double q) {
    const ResolventPoint j = resolve(g, eps, q);
    const double gap = q - j.point;
    return gap * gap / (2.0 * eps) + g.value(j.point);
}

double yosida_grad(const ConvexIntegrand& g, double eps, double q) { return resolve(g, eps, q).slope; }

MonotoneGraph1D fill_jumps(std::span<const double> x, std::span<const double> y, double jump_detection_threshold) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw std::invalid_argument("fill_jumps needs at least two matching samples");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(x[i] > x[i - 1])) throw std::invalid_argument("fill_jumps abscissae must be strictly increasing");
    }

    std::vector<double> dy(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) dy[i] = y[i + 1] - y[i];

    // Local slope: median of neighboring increments over their spacing,
    // so that a single jump does not inflate its own threshold.
    auto local_slope = [&](std::size_t i) {
        std::vector<double> s;
        for (std::size_t k = (i >= 2 ? i - 2 : 0); k <= std::min(n - 2, i + 2); ++k) {
            if (k == i) continue;
            s.push_back(std::abs(dy[k]) / (x[k + 1] - x[k]));
        }
        if (s.empty()) return 0.0;
        std::nth_element(s.begin(), s.begin() + s.size() / 2, s.end());
        return s[s.size() / 2];
    };

    std::vector<MonotoneGraph1D::Jump> jumps;
    std::vector<double> xs(x.begin(), x.end());
    std::vector<double> ys(y.begin(), y.end());
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = x[i + 1] - x[i];
        const double slope = local_slope(i);
        const double thr = jump_detection_threshold >= 0.0 ? jump_detection_threshold
                                                           : std::max(10.0 * h * slope, 1e-12 * (1.0 + std::abs(y[i])));
        if (dy[i] < -thr) throw ConvexError("not monotone: decreasing sample pair beyond threshold");
        if (dy[i] > thr) jumps.push_back({0.5 * (x[i] + x[i + 1]), y[i], y[i + 1]});
    }

    // A detected jump replaces the linear ramp between its two samples by a step.
    std::vector<bool> stepped(n - 1, false);
    for (std::size_t i = 0, k = 0; i + 1 < n && k < jumps.size(); ++i) {
        if (jumps[k].location == 0.5 * (x[i] + x[i + 1])) {
            stepped[i] = true;
            ++k;
        }
    }
    auto branch = [xs, ys, stepped](double q) {
        if (q <= xs.front()) return ys.front();
        if (q >= xs.back()) return ys.back();
        auto it = std::upper_bound(xs.begin(), xs.end(), q);
        const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
        if (stepped[i]) return q < 0.5 * (xs[i] + xs[i + 1]) ? ys[i] : ys[i + 1];
        const double t = (q - xs[i]) / (xs[i + 1] - xs[i]);
        return ys[i] + t * (ys[i + 1] - ys[i]);
    };
    return MonotoneGraph1D(branch, std::move(jumps));
}

std::optional<double> graph_inverse(const MonotoneGraph1D& graph, double eta) {
    for (const auto& j : graph.jumps()) {
        if (eta >= j.left && eta <= j.right) return j.location;
    }
    double lo = 0.0, hi = 0.0;
    double step = 1.0;
    int guard = 0;
    while (graph.branch(lo) > eta) {
        lo -= step;
        step *= 2.0;
        if (++guard > 60) return std::nullopt;
    }
    step = 1.0;
    guard = 0;
    while (graph.branch(hi) < eta) {
        hi += step;
        step *= 2.0;
        if (++guard > 60) return std::nullopt;
    }
    if (graph.branch(lo) == eta) return lo;
    if (graph.branch(hi) == eta) return hi;
    for (int it = 0; it < 2200; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        if (graph.branch(mid) < eta)
            lo = mid;
        else
            hi = mid;
    }
    return lo + 0.5 * (hi - lo);
}

IntegrandPtr hamiltonian_from_lagrangian(const IntegrandPtr& lagrangian, int search_resolution) {
    if (!lagrangian) throw std::invalid_argument("null Lagrangian");
    if (!std::isfinite(lagrangian->domain_radius()))
        throw std::invalid_argument("Lagrangian must be +inf outside a bounded ball (bounded control set)");
    if (auto partner = lagrangian->conjugate_partner()) return partner;
    return std::make_shared<LatticeConjugate>(lagrangian, search_resolution);
}

}  // namespace mfg
