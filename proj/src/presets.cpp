#include "mfg/presets.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

namespace mfg {

namespace {

constexpr double kBallSlack = 1e-12;

double norm2(std::span<const double> u) {
    double s = 0.0;
    for (double x : u) s += x * x;
    return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

bool in_ball(double r, double a) { return r <= a * (1.0 + kBallSlack); }

Vec scaled(std::span<const double> u, double s) {
    Vec out(u.begin(), u.end());
    for (double& x : out) x *= s;
    return out;
}

double sign(double x) { return (x > 0.0) - (x < 0.0); }

class BallIndicator;
class Norm;
class Quadratic;
class QuadraticCapped;
class Huber;
class SqrtHamiltonian;
class SqrtLagrangian;
class Constant;
class OriginIndicator;

class BallIndicator final : public ConvexIntegrand {
public:
    explicit BallIndicator(double a) : ConvexIntegrand("ball-indicator", {{"a", a}}), a_(a) {}
    double value(std::span<const double> u) const override { return in_ball(norm2(u), a_) ? 0.0 : kInfinity; }
    double domain_radius() const override { return a_; }
    double directional_derivative(std::span<const double> u, std::span<const double> v) const override {
        const double r = norm2(u);
        if (!in_ball(r, a_)) return kInfinity;
        if (r < a_ * (1.0 - kBallSlack)) return 0.0;
        return dot(u, v) > 0.0 ? kInfinity : 0.0;
    }
    std::optional<double> analytic_conjugate(std::span<const double> v) const override { return a_ * norm2(v); }
    std::optional<SubgradientSelection> analytic_subgradient(std::span<const double> u, SelectionRule,
                                                             std::span<const double>) const override {
        const double r = norm2(u);
        if (!in_ball(r, a_)) throw ConvexError("empty subdifferential: point outside the ball");
        return SubgradientSelection{Vec(u.size(), 0.0), r < a_ * (1.0 - kBallSlack)};
    }
    std::shared_ptr<const ConvexIntegrand> conjugate_partner() const override;

private:
    double a_;
};

class Norm final : public ConvexIntegrand {
public:
    Norm(std::string name, std::string key, double a) : ConvexIntegrand(name, {{key, a}}), a_(a) {}
    double value(std::span<const double> q) const override { return a_ * norm2(q); }
    double lipschitz_constant() const override { return a_; }
    std::optional<double> growth_exponent() const override { return 1.0; }
    double directional_derivative(std::span<const double> q, std::span<const double> v) const override {
        const double r = norm2(q);
        return r > 0.0 ? a_ * dot(q, v) / r : a_ * norm2(v);
    }
    std::optional<double> analytic_conjugate(std::span<const double> v) const override {
        return in_ball(norm2(v), a_) ? 0.0 : kInfinity;
    }
    std::optional<SubgradientSelection> analytic_subgradient(std::span<const double> q, SelectionRule rule,
                                                             std::span<const double> direction) const override {
        const double r = norm2(q);
        if (r > 0.0) return SubgradientSelection{scaled(q, a_ / r), true};
        if (rule == SelectionRule::GivenDirection && norm2(direction) > 0.0)
            return SubgradientSelection{scaled(direction, a_ / norm2(direction)), false};
        return SubgradientSelection{Vec(q.size(), 0.0), false};
    }
    std::optional<MonotoneGraph1D> subdifferential_graph() const override {
        const double a = a_;
        return MonotoneGraph1D([a](double r) { return a * sign(r); }, {{0.0, -a, a}});
    }
    std::optional<double> analytic_resolvent(double eps, double q) const override {
        const double t = eps * a_;
        if (std::abs(q) <= t) return 0.0;
        return q - t * sign(q);
    }
    std::shared_ptr<const ConvexIntegrand> conjugate_partner() const override;

private:
    double a_;
};

class Quadratic final : public ConvexIntegrand {
public:
    explicit Quadratic(double c) : ConvexIntegrand("quadratic", {{"c", c}}), c_(c) {}
    double value(std::span<const double> u) const override {
        const double r = norm2(u);
        return 0.5 * c_ * r * r;
    }
    bool strictly_convex() const override { return true; }
    std::optional<double> growth_exponent() const override { return 2.0; }
    double directional_derivative(std::span<const double> u, std::span<const double> v) const override {
        return c_ * dot(u, v);
    }
    std::optional<double> analytic_conjugate(std::span<const double> v) const override {
        const double r = norm2(v);
        return 0.5 * r * r / c_;
    }
    std::optional<SubgradientSelection> analytic_subgradient(std::span<const double> u, SelectionRule,
                                                             std::span<const double>) const override {
        return SubgradientSelection{scaled(u, c_), true};
    }
    std::optional<MonotoneGraph1D> subdifferential_graph() const override {
        const double c = c_;
        return MonotoneGraph1D([c](double r) { return c * r; });
    }
    std::optional<double> analytic_resolvent(double eps, double q) const override { return q / (1.0 + eps * c_); }
    std::shared_ptr<const ConvexIntegrand> conjugate_partner() const override {
        return std::make_shared<Quadratic>(1.0 / c_);
    }

private:
    double c_;
};

class QuadraticCapped final : public ConvexIntegrand {
public:
    explicit QuadraticCapped(double a) : ConvexIntegrand("quadratic-capped", {{"a", a}}), a_(a) {}
    double value(std::span<const double> u) const override {
        const double r = norm2(u);
        return in_ball(r, a_) ? 0.5 * r * r : kInfinity;
    }
    double domain_radius() const override { return a_; }
    bool strictly_convex() const override { return true; }
    std::optional<double> analytic_conjugate(std::span<const double> v) const override {
        const double r = norm2(v);
        return r <= a_ ? 0.5 * r * r : a_ * r - 0.5 * a_ * a_;
    }
    std::optional<SubgradientSelection> analytic_subgradient(std::span<const double> u, SelectionRule,
                                                             std::span<const double>) const override {
        const double r = norm2(u);
        if (!in_ball(r, a_)) throw ConvexError("empty subdifferential: point outside the ball");
        return SubgradientSelection{Vec(u.begin(), u.end()), r < a_ * (1.0 - kBallSlack)};
    }
    std::shared_ptr<const ConvexIntegrand> conjugate_partner() const override;

private:
    double a_;
};

class Huber final : public ConvexIntegrand {
public:
    explicit Huber(double a) : ConvexIntegrand("huber", {{"a", a}}), a_(a) {}
    double value(std::span<const double> q) const override {
        const double r = norm2(q);
        return r <= a_ ? 0.5 * r * r : a_ * r - 0.5 * a_ * a_;
    }
    double lipschitz_constant() const override { return a_; }
    std::optional<double> growth_exponent() const override { return 1.0; }
    double directional_derivative(std::span<const double> q, std::span<const double> v) const override {
        const double r = norm2(q);
        return r <= a_ ? dot(q, v) : a_ * dot(q, v) / r;
    }
    std::optional<double> analytic_conjugate(std::span<const double> v) const override {
        const double r = norm2(v);
        return in_ball(r, a_) ? 0.5 * r * r : kInfinity;
    }
    std::optional<SubgradientSelection> analytic_subgradient(std::span<const double> q, SelectionRule,
                                                             std::span<const double>) const override {
        const double r = norm2(q);
        return SubgradientSelection{r <= a_ ? Vec(q.begin(), q.end()) : scaled(q, a_ / r), true};
    }
    std::optional<MonotoneGraph1D> subdifferential_graph() const override {
        const double a = a_;
        return MonotoneGraph1D([a](double r) { return std::clamp(r, -a, a); });
    }
    std::optional<double> analytic_resolvent(double eps, double q) const override {
        const double r = q / (1.0 + eps);
        if (std::abs(r) <= a_) return r;
        return q - eps * a_ * sign(q);
    }
    std::shared_ptr<const ConvexIntegrand> conjugate_partner() const override {
        return std::make_shared<QuadraticCapped>(a_);
    }

private:
    double a_;
};

class SqrtHamiltonian final : public ConvexIntegrand {
public:
    explicit SqrtHamiltonian(double a) : ConvexIntegrand("sqrt", {{"a", a}}), a_(a) {}
    double value(std::span<const double> q) const override {
        const double r2 = dot(q, q);
        return a_ * r2 / (std::sqrt(1.0 + r2) + 1.0);
    }
    double lipschitz_constant() const override { return a_; }
    bool strictly_convex() const override { return true; }
    std::optional<double> growth_exponent() const override { return 1.0; }
    double directional_derivative(std::span<const double> q, std::span<const double> v) const override {
        return a_ * dot(q, v) / std::sqrt(1.0 + dot(q, q));
    }
    std::optional<double> analytic_conjugate(std::span<const double> v) const override {
        const double r2 = dot(v, v);
        if (!in_ball(std::sqrt(r2), a_)) return kInfinity;
        return r2 / (a_ + std::sqrt(std::max(0.0, a_ * a_ - r2)));
    }
    std::optional<SubgradientSelection> analytic_subgradient(std::span<const double> q, SelectionRule,
                                                             std::span<const double>) const override {
        return SubgradientSelection{scaled(q, a_ / std::sqrt(1.0 + dot(q, q))), true};
    }
    std::optional<MonotoneGraph1D> subdifferential_graph() const override {
        const double a = a_;
        return MonotoneGraph1D([a](double r) { return a * r / std::sqrt(1.0 + r * r); });
    }
    std::shared_ptr<const ConvexIntegrand> conjugate_partner() const override;

private:
    double a_;
};

class SqrtLagrangian final : public ConvexIntegrand {
public:
    explicit SqrtLagrangian(double a) : ConvexIntegrand("sqrt-lagrangian", {{"a", a}}), a_(a) {}
    double value(std::span<const double> u) const override {
        const double r2 = dot(u, u);
        if (!in_ball(std::sqrt(r2), a_)) return kInfinity;
        return r2 / (a_ + std::sqrt(std::max(0.0, a_ * a_ - r2)));
    }
    double domain_radius() const override { return a_; }
    bool strictly_convex() const override { return true; }
    std::optional<double> analytic_conjugate(std::span<const double> v) const override {
        const double r2 = dot(v, v);
        return a_ * r2 / (std::sqrt(1.0 + r2) + 1.0);
    }
    std::optional<SubgradientSelection> analytic_subgradient(std::span<const double> u, SelectionRule,
                                                             std::span<const double>) const override {
        const double gap = a_ * a_ - dot(u, u);
        if (!(gap > 0.0)) throw ConvexError("empty subdifferential: boundary of the sqrt Lagrangian domain");
        return SubgradientSelection{scaled(u, 1.0 / std::sqrt(gap)), true};
    }
    std::shared_ptr<const ConvexIntegrand> conjugate_partner() const override {
        return std::make_shared<SqrtHamiltonian>(a_);
    }

private:
    double a_;
};

class Constant final : public ConvexIntegrand {
public:
    Constant(std::string name, double c) : ConvexIntegrand(std::move(name), {{"c", c}}), c_(c) {}
    double value(std::span<const double>) const override { return c_; }
    double lipschitz_constant() const override { return 0.0; }
    std::optional<double> growth_exponent() const override { return 0.0; }
    double directional_derivative(std::span<const double>, std::span<const double>) const override { return 0.0; }
    std::optional<double> analytic_conjugate(std::span<const double> v) const override {
        return norm2(v) == 0.0 ? -c_ : kInfinity;
    }
    std::optional<SubgradientSelection> analytic_subgradient(std::span<const double> u, SelectionRule,
                                                             std::span<const double>) const override {
        return SubgradientSelection{Vec(u.size(), 0.0), true};
    }
    std::optional<MonotoneGraph1D> subdifferential_graph() const override {
        return MonotoneGraph1D([](double) { return 0.0; });
    }
    std::optional<double> analytic_resolvent(double, double q) const override { return q; }
    std::shared_ptr<const ConvexIntegrand> conjugate_partner() const override;

private:
    double c_;
};

class OriginIndicator final : public ConvexIntegrand {
public:
    explicit OriginIndicator(double c) : ConvexIntegrand("origin-indicator", {{"c", c}}), c_(c) {}
    double value(std::span<const double> u) const override { return norm2(u) == 0.0 ? -c_ : kInfinity; }
    double domain_radius() const override { return 0.0; }
    double directional_derivative(std::span<const double> u, std::span<const double> v) const override {
        return norm2(u) == 0.0 && norm2(v) == 0.0 ? 0.0 : kInfinity;
    }
    std::optional<double> analytic_conjugate(std::span<const double>) const override { return c_; }
    std::optional<SubgradientSelection> analytic_subgradient(std::span<const double> u, SelectionRule,
                                                             std::span<const double>) const override {
        if (norm2(u) != 0.0) throw ConvexError("empty subdifferential: point outside the origin");
        return SubgradientSelection{Vec(u.size(), 0.0), false};
    }
    std::shared_ptr<const ConvexIntegrand> conjugate_partner() const override {
        return std::make_shared<Constant>("constant", c_);
    }

private:
    double c_;
};

std::shared_ptr<const ConvexIntegrand> BallIndicator::conjugate_partner() const {
    return std::make_shared<Norm>("norm", "a", a_);
}
std::shared_ptr<const ConvexIntegrand> Norm::conjugate_partner() const { return std::make_shared<BallIndicator>(a_); }
std::shared_ptr<const ConvexIntegrand> QuadraticCapped::conjugate_partner() const {
    return std::make_shared<Huber>(a_);
}
std::shared_ptr<const ConvexIntegrand> SqrtHamiltonian::conjugate_partner() const {
    return std::make_shared<SqrtLagrangian>(a_);
}
std::shared_ptr<const ConvexIntegrand> Constant::conjugate_partner() const {
    return std::make_shared<OriginIndicator>(c_);
}

// Scalar couplings. Vector arguments use the first component.

class Linear final : public ConvexIntegrand {
public:
    explicit Linear(double c) : ConvexIntegrand("linear", {{"c", c}}), c_(c) {}
    double value(std::span<const double> u) const override { return c_ * u[0]; }
    double lipschitz_constant() const override { return std::abs(c_); }
    std::optional<double> growth_exponent() const override { return 1.0; }
    double directional_derivative(std::span<const double>, std::span<const double> v) const override {
        return c_ * v[0];
    }
    std::optional<double> analytic_conjugate(std::span<const double> v) const override {
        return std::abs(v[0] - c_) <= 1e-12 * (1.0 + std::abs(c_)) ? 0.0 : kInfinity;
    }
    std::optional<SubgradientSelection> analytic_subgradient(std::span<const double>, SelectionRule,
                                                             std::span<const double>) const override {
        return SubgradientSelection{Vec{c_}, true};
    }
    std::optional<MonotoneGraph1D> subdifferential_graph() const override {
        const double c = c_;
        return MonotoneGraph1D([c](double) { return c; });
    }
    std::optional<double> analytic_resolvent(double eps, double q) const override { return q - eps * c_; }

private:
    double c_;
};

class Quartic final : public ConvexIntegrand {
public:
    explicit Quartic(double c) : ConvexIntegrand("quartic", {{"c", c}}), c_(c) {}
    double value(std::span<const double> u) const override {
        const double r2 = dot(u, u);
        return 0.25 * c_ * r2 * r2;
    }
    bool strictly_convex() const override { return true; }
    std::optional<double> growth_exponent() const override { return 4.0; }
    double directional_derivative(std::span<const double> u, std::span<const double> v) const override {
        return c_ * dot(u, u) * dot(u, v);
    }
    std::optional<double> analytic_conjugate(std::span<const double> v) const override {
        return 0.75 * std::pow(c_, -1.0 / 3.0) * std::pow(norm2(v), 4.0 / 3.0);
    }
    std::optional<SubgradientSelection> analytic_subgradient(std::span<const double> u, SelectionRule,
                                                             std::span<const double>) const override {
        return SubgradientSelection{scaled(u, c_ * dot(u, u)), true};
    }
    std::optional<MonotoneGraph1D> subdifferential_graph() const override {
        const double c = c_;
        return MonotoneGraph1D([c](double r) { return c * r * r * r; });
    }

private:
    double c_;
};

// g(r) = slope r^2/2 + sum_k h_k (r - l_k)^+, with subdifferential
// slope r + sum_{l_k < r} h_k and vertical segments at each l_k.
class StepCoupling final : public ConvexIntegrand {
public:
    struct Step {
        double at;
        double height;
    };

    StepCoupling(Parameters params, double slope, std::vector<Step> steps)
        : ConvexIntegrand("step-coupling", std::move(params)), slope_(slope), steps_(std::move(steps)) {
        std::sort(steps_.begin(), steps_.end(), [](const Step& a, const Step& b) { return a.at < b.at; });
        cumulative_.resize(steps_.size() + 1, 0.0);
        for (std::size_t k = 0; k < steps_.size(); ++k) cumulative_[k + 1] = cumulative_[k] + steps_[k].height;
    }

    double value(std::span<const double> u) const override {
        const double r = u[0];
        double v = 0.5 * slope_ * r * r;
        for (const auto& s : steps_) v += s.height * std::max(0.0, r - s.at);
        return v;
    }
    double lipschitz_constant() const override { return slope_ == 0.0 ? cumulative_.back() : kInfinity; }
    bool strictly_convex() const override { return slope_ > 0.0; }
    std::optional<double> growth_exponent() const override { return slope_ > 0.0 ? 2.0 : 1.0; }

    // Offset of the branch strictly to the left or right of r.
    double left_offset(double r) const {
        std::size_t k = 0;
        while (k < steps_.size() && steps_[k].at < r) ++k;
        return cumulative_[k];
    }
    double right_offset(double r) const {
        std::size_t k = 0;
        while (k < steps_.size() && steps_[k].at <= r) ++k;
        return cumulative_[k];
    }

    double directional_derivative(std::span<const double> u, std::span<const double> v) const override {
        const double r = u[0];
        return v[0] >= 0.0 ? v[0] * (slope_ * r + right_offset(r)) : v[0] * (slope_ * r + left_offset(r));
    }
    std::optional<SubgradientSelection> analytic_subgradient(std::span<const double> u, SelectionRule rule,
                                                             std::span<const double> direction) const override {
        const double r = u[0];
        const double lo = slope_ * r + left_offset(r);
        const double hi = slope_ * r + right_offset(r);
        if (lo == hi) return SubgradientSelection{Vec{lo}, true};
        double pick = std::clamp(0.0, lo, hi);
        if (rule == SelectionRule::GivenDirection && !direction.empty() && direction[0] != 0.0)
            pick = direction[0] > 0.0 ? hi : lo;
        return SubgradientSelection{Vec{pick}, false};
    }
    std::optional<MonotoneGraph1D> subdifferential_graph() const override {
        std::vector<MonotoneGraph1D::Jump> jumps;
        for (std::size_t k = 0; k < steps_.size(); ++k) {
            const double l = steps_[k].at;
            if (!jumps.empty() && jumps.back().location == l) continue;
            jumps.push_back({l, slope_ * l + left_offset(l), slope_ * l + right_offset(l)});
        }
        auto self = this;
        return MonotoneGraph1D([self](double r) { return self->slope_ * r + self->left_offset(r); },
                               std::move(jumps));
    }
    std::optional<double> analytic_resolvent(double eps, double q) const override {
        // Walk the pieces in order: on the open piece (l_{k-1}, l_k) the map
        // r + eps G(r) is affine; at l_k it covers a vertical segment.
        double lo_edge = -kInfinity;
        std::size_t k = 0;
        while (true) {
            const double offset = cumulative_[k];
            const double hi_edge = k < steps_.size() ? steps_[k].at : kInfinity;
            const double scale = 1.0 + eps * slope_;
            const double r = (q - eps * offset) / scale;
            if (r > lo_edge && r < hi_edge) return r;
            if (r <= lo_edge) return lo_edge;  // landed on the previous segment
            if (k == steps_.size()) return r;
            // q beyond the open piece: check the segment at hi_edge.
            const double seg_hi = hi_edge + eps * (slope_ * hi_edge + right_offset(hi_edge));
            if (q <= seg_hi) return hi_edge;
            lo_edge = hi_edge;
            while (k < steps_.size() && steps_[k].at == hi_edge) ++k;
        }
    }
    std::optional<double> analytic_conjugate(std::span<const double> v) const override {
        auto graph = subdifferential_graph();
        auto r = graph_inverse(*graph, v[0]);
        if (!r) return kInfinity;
        return v[0] * *r - value(std::span<const double>(&*r, 1));
    }

    const std::vector<Step>& steps() const { return steps_; }

private:
    double slope_;
    std::vector<Step> steps_;
    std::vector<double> cumulative_;
};

double get(const Parameters& p, const std::string& key, double fallback) {
    auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
}

double positive(const Parameters& p, const std::string& preset, const std::string& key, double fallback) {
    const double v = get(p, key, fallback);
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument("preset '" + preset + "' parameter '" + key + "' must be positive");
    return v;
}

IntegrandPtr make_step_coupling(const Parameters& p) {
    const double slope = get(p, "slope", 0.0);
    if (!(slope >= 0.0)) throw std::invalid_argument("preset 'step-coupling' parameter 'slope' must be nonnegative");
    std::map<int, StepCoupling::Step> by_index;
    std::map<int, int> seen;
    for (const auto& [key, value] : p) {
        if (key.rfind("jump.", 0) != 0) continue;
        const auto dot_pos = key.find('.', 5);
        if (dot_pos == std::string::npos)
            throw std::invalid_argument("preset 'step-coupling' key '" + key + "' must be jump.K.at or jump.K.height");
        const int idx = std::stoi(key.substr(5, dot_pos - 5));
        const std::string field = key.substr(dot_pos + 1);
        if (field == "at") {
            by_index[idx].at = value;
            seen[idx] |= 1;
        } else if (field == "height") {
            if (!(value > 0.0))
                throw std::invalid_argument("preset 'step-coupling' key '" + key + "' must be a positive height");
            by_index[idx].height = value;
            seen[idx] |= 2;
        } else {
            throw std::invalid_argument("preset 'step-coupling' key '" + key + "' has unknown field");
        }
    }
    std::vector<StepCoupling::Step> steps;
    for (const auto& [idx, s] : by_index) {
        if (seen[idx] != 3)
            throw std::invalid_argument("preset 'step-coupling' jump " + std::to_string(idx) +
                                        " needs both 'at' and 'height'");
        steps.push_back(s);
    }
    if (steps.empty() && slope == 0.0)
        throw std::invalid_argument("preset 'step-coupling' needs a positive slope or at least one jump");
    return std::make_shared<StepCoupling>(p, slope, std::move(steps));
}

using Factory = std::function<IntegrandPtr(const Parameters&)>;

const std::map<std::string, Factory>& registry() {
    static const std::map<std::string, Factory> r = {
        {"ball-indicator", [](const Parameters& p) { return std::make_shared<BallIndicator>(positive(p, "ball-indicator", "a", 1.0)); }},
        {"norm", [](const Parameters& p) { return std::make_shared<Norm>("norm", "a", positive(p, "norm", "a", 1.0)); }},
        {"abs", [](const Parameters& p) { return std::make_shared<Norm>("abs", "c", positive(p, "abs", "c", 1.0)); }},
        {"quadratic", [](const Parameters& p) { return std::make_shared<Quadratic>(positive(p, "quadratic", "c", 1.0)); }},
        {"quadratic-capped", [](const Parameters& p) { return std::make_shared<QuadraticCapped>(positive(p, "quadratic-capped", "a", 1.0)); }},
        {"huber", [](const Parameters& p) { return std::make_shared<Huber>(positive(p, "huber", "a", 1.0)); }},
        {"sqrt", [](const Parameters& p) { return std::make_shared<SqrtHamiltonian>(positive(p, "sqrt", "a", 1.0)); }},
        {"sqrt-lagrangian", [](const Parameters& p) { return std::make_shared<SqrtLagrangian>(positive(p, "sqrt-lagrangian", "a", 1.0)); }},
        {"constant", [](const Parameters& p) { return std::make_shared<Constant>("constant", get(p, "c", 0.0)); }},
        {"zero", [](const Parameters&) { return std::make_shared<Constant>("zero", 0.0); }},
        {"origin-indicator", [](const Parameters& p) { return std::make_shared<OriginIndicator>(get(p, "c", 0.0)); }},
        {"linear", [](const Parameters& p) { return std::make_shared<Linear>(get(p, "c", 1.0)); }},
        {"quartic", [](const Parameters& p) { return std::make_shared<Quartic>(positive(p, "quartic", "c", 1.0)); }},
        {"step-coupling", make_step_coupling},
    };
    return r;
}

}  // namespace

IntegrandPtr make_integrand(const std::string& name, const Parameters& params) {
    const auto& r = registry();
    auto it = r.find(name);
    if (it == r.end()) throw std::invalid_argument("unknown preset '" + name + "'");
    return it->second(params);
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : registry()) names.push_back(k);
    return names;
}

}  // namespace mfg
