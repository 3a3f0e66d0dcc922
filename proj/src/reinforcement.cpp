#include "polya/reinforcement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace polya {

namespace {

constexpr double kGridInset = 1e-6;  // boundary inset for infimum/monotonicity scans
constexpr double kAlphaTol = 1e-9;   // condition (C) margin

void check_domain(double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        std::ostringstream os;
        os << "reinforcement argument " << x << " outside [0,1]";
        throw std::domain_error(os.str());
    }
}

// Fritsch-Carlson slopes: the Hermite interpolant is monotone whenever the
// data are, so tabulated monotone data never trip the condition (A) scan.
std::vector<double> monotone_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> h(n - 1), delta(n - 1), m(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    if (n == 2) {
        m[0] = m[1] = delta[0];
        return m;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            m[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    auto endpoint = [](double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0.0) return 0.0;
        if (d0 * d1 < 0.0 && std::abs(s) > 3.0 * std::abs(d0)) return 3.0 * d0;
        return s;
    };
    m[0] = endpoint(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = endpoint(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return m;
}

}  // namespace

Reinforcement Reinforcement::power(double exponent) {
    if (!(exponent > 0.0) || !std::isfinite(exponent)) {
        throw std::invalid_argument("power reinforcement requires exponent > 0");
    }
    Reinforcement f;
    f.family_ = ReinforcementFamily::power;
    f.mode_ = DerivativeMode::analytic;
    f.param_ = exponent;
    return f;
}

Reinforcement Reinforcement::power_exp(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw std::invalid_argument("power_exp reinforcement requires epsilon > 0");
    }
    Reinforcement f;
    f.family_ = ReinforcementFamily::power_exp;
    f.mode_ = DerivativeMode::analytic;
    f.param_ = epsilon;
    return f;
}

Reinforcement Reinforcement::tabulated(std::vector<std::pair<double, double>> points,
                                       DerivativeMode mode, double fd_step) {
    if (points.size() < 2) {
        throw std::invalid_argument("tabulated reinforcement needs at least 2 points");
    }
    if (!(fd_step > 0.0) || fd_step >= 0.25) {
        throw std::invalid_argument("tabulated reinforcement: fd_step must lie in (0, 0.25)");
    }
    std::sort(points.begin(), points.end());
    Reinforcement f;
    f.family_ = ReinforcementFamily::tabulated;
    f.mode_ = mode;
    f.fd_step_ = fd_step;
    f.xs_.reserve(points.size());
    f.ys_.reserve(points.size());
    for (const auto& [x, y] : points) {
        if (!std::isfinite(x) || !std::isfinite(y)) {
            throw std::invalid_argument("tabulated reinforcement: non-finite point");
        }
        if (y < 0.0) {
            throw std::invalid_argument("tabulated reinforcement: negative value");
        }
        if (!f.xs_.empty()) {
            if (x <= f.xs_.back()) {
                throw std::invalid_argument("tabulated reinforcement: x values must be strictly increasing");
            }
            if (y < f.ys_.back()) {
                throw std::invalid_argument("tabulated reinforcement: values must be non-decreasing");
            }
        }
        f.xs_.push_back(x);
        f.ys_.push_back(y);
    }
    if (f.xs_.front() != 0.0 || f.xs_.back() != 1.0) {
        throw std::invalid_argument("tabulated reinforcement must cover [0,1] exactly");
    }
    if (std::abs(f.ys_.front()) > 1e-12) {
        throw std::invalid_argument("tabulated reinforcement requires f(0)=0");
    }
    f.ys_.front() = 0.0;  // dead colors must stay dead
    f.slopes_ = monotone_slopes(f.xs_, f.ys_);
    return f;
}

double Reinforcement::evaluate_raw(double x) const {
    switch (family_) {
        case ReinforcementFamily::power:
            return std::pow(x, param_);
        case ReinforcementFamily::power_exp:
            return std::pow(x, 2.0 + param_) * std::exp(1.0 - x);
        case ReinforcementFamily::tabulated:
            return hermite_value(x);
    }
    return 0.0;
}

double Reinforcement::evaluate(double x) const {
    check_domain(x);
    if (x == 0.0) return 0.0;
    return evaluate_raw(x);
}

double Reinforcement::hermite_value(double x) const {
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const std::size_t i = it == xs_.begin() ? 0
                        : std::min<std::size_t>(xs_.size() - 2, std::size_t(it - xs_.begin()) - 1);
    const double h = xs_[i + 1] - xs_[i];
    const double t = (x - xs_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * ys_[i] + h10 * h * slopes_[i] + h01 * ys_[i + 1] + h11 * h * slopes_[i + 1];
}

double Reinforcement::hermite_derivative(double x) const {
    const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    const std::size_t i = it == xs_.begin() ? 0
                        : std::min<std::size_t>(xs_.size() - 2, std::size_t(it - xs_.begin()) - 1);
    const double h = xs_[i + 1] - xs_[i];
    const double t = (x - xs_[i]) / h;
    const double t2 = t * t;
    const double dh00 = (6.0 * t2 - 6.0 * t) / h;
    const double dh10 = 3.0 * t2 - 4.0 * t + 1.0;
    const double dh01 = (-6.0 * t2 + 6.0 * t) / h;
    const double dh11 = 3.0 * t2 - 2.0 * t;
    return dh00 * ys_[i] + dh10 * slopes_[i] + dh01 * ys_[i + 1] + dh11 * slopes_[i + 1];
}

double Reinforcement::analytic_derivative(double x) const {
    switch (family_) {
        case ReinforcementFamily::power:
            return param_ * std::pow(x, param_ - 1.0);
        case ReinforcementFamily::power_exp:
            return (2.0 + param_ - x) * std::pow(x, 1.0 + param_) * std::exp(1.0 - x);
        case ReinforcementFamily::tabulated:
            return hermite_derivative(x);
    }
    return 0.0;
}

double Reinforcement::finite_difference(double x) const {
    const double h = fd_step_;
    if (x < 2.0 * h) {
        return (evaluate(x + h) - evaluate(x)) / h;
    }
    if (x > 1.0 - 2.0 * h) {
        return (evaluate(x) - evaluate(x - h)) / h;
    }
    return (evaluate(x + h) - evaluate(x - h)) / (2.0 * h);
}

double Reinforcement::derivative(double x) const {
    if (!(x > 0.0 && x < 1.0)) {
        throw std::domain_error("derivative requires 0 < x < 1; use the one-sided accessors at the boundary");
    }
    return mode_ == DerivativeMode::analytic ? analytic_derivative(x) : finite_difference(x);
}

double Reinforcement::derivative_limit_zero_plus() const {
    switch (family_) {
        case ReinforcementFamily::power:
            if (param_ > 1.0) return 0.0;
            if (param_ == 1.0) return 1.0;
            return std::numeric_limits<double>::infinity();
        case ReinforcementFamily::power_exp:
            return 0.0;
        case ReinforcementFamily::tabulated:
            return slopes_.front();
    }
    return 0.0;
}

double Reinforcement::derivative_limit_one_minus() const {
    switch (family_) {
        case ReinforcementFamily::power:
            return param_;
        case ReinforcementFamily::power_exp:
            return 1.0 + param_;
        case ReinforcementFamily::tabulated:
            return slopes_.back();
    }
    return 0.0;
}

double Reinforcement::derivative_zero_plus() const {
    if (family_ == ReinforcementFamily::tabulated && mode_ == DerivativeMode::central_difference) {
        return finite_difference(0.0);
    }
    return derivative_limit_zero_plus();
}

double Reinforcement::derivative_one_minus() const {
    if (family_ == ReinforcementFamily::tabulated && mode_ == DerivativeMode::central_difference) {
        return finite_difference(1.0);
    }
    return derivative_limit_one_minus();
}

double Reinforcement::ratio_zero_limit() const {
    switch (family_) {
        case ReinforcementFamily::power:
            if (param_ > 1.0) return 0.0;
            if (param_ == 1.0) return 1.0;
            return std::numeric_limits<double>::infinity();
        case ReinforcementFamily::power_exp:
            return 0.0;
        case ReinforcementFamily::tabulated:
            return slopes_.front();  // f ~ m_0 x near 0
    }
    return 0.0;
}

double Reinforcement::alpha_at(double x) const {
    const double fx = evaluate(x);
    if (fx == 0.0 && x > 0.0) {
        std::ostringstream os;
        os << "f(" << x << ") = 0 with x > 0: f is not strictly increasing from 0";
        throw std::domain_error(os.str());
    }
    return x * derivative(x) / fx;
}

double Reinforcement::boundary_alpha_zero() const {
    switch (family_) {
        case ReinforcementFamily::power:
            return param_;
        case ReinforcementFamily::power_exp:
            return 2.0 + param_;  // alpha(x) = 2 + eps - x
        case ReinforcementFamily::tabulated: {
            // interpolant limit via its exact piecewise-cubic derivative
            const double x = 1e-9;
            const double fx = hermite_value(x);
            if (fx <= 0.0) throw std::domain_error("tabulated f vanishes near 0");
            return x * hermite_derivative(x) / fx;
        }
    }
    return 0.0;
}

double Reinforcement::boundary_alpha_one() const {
    switch (family_) {
        case ReinforcementFamily::power:
            return param_;
        case ReinforcementFamily::power_exp:
            return 1.0 + param_;
        case ReinforcementFamily::tabulated: {
            const double x = 1.0 - 1e-9;
            const double fx = hermite_value(x);
            if (fx <= 0.0) throw std::domain_error("tabulated f vanishes near 1");
            return x * hermite_derivative(x) / fx;
        }
    }
    return 0.0;
}

std::string Reinforcement::describe() const {
    std::ostringstream os;
    switch (family_) {
        case ReinforcementFamily::power:
            os << "power(" << param_ << ")";
            break;
        case ReinforcementFamily::power_exp:
            os << "power_exp(" << param_ << ")";
            break;
        case ReinforcementFamily::tabulated:
            os << "tabulated[" << xs_.size() << " points]";
            break;
    }
    return os.str();
}

double alpha_inf(const Reinforcement& f, int grid_points) {
    if (grid_points < 3) throw std::invalid_argument("alpha_inf needs at least 3 grid points");
    if (f.family() == ReinforcementFamily::power) {
        return f.exponent();  // alpha(x) is constant
    }
    const double lo = kGridInset, hi = 1.0 - kGridInset;
    double best = std::min(f.boundary_alpha_zero(), f.boundary_alpha_one());
    for (int i = 0; i < grid_points; ++i) {
        const double x = lo + (hi - lo) * double(i) / double(grid_points - 1);
        best = std::min(best, f.alpha_at(x));
    }
    return best;
}

ClassRReport validate_class_r(const Reinforcement& f, int grid_points) {
    ClassRReport rep;
    const double lo = kGridInset, hi = 1.0 - kGridInset;
    auto grid_x = [&](int i) { return lo + (hi - lo) * double(i) / double(grid_points - 1); };

    // (A): endpoints, finiteness, non-negativity, strict monotonicity
    rep.cond_a.pass = true;
    try {
        const double f0 = f.evaluate(0.0);
        const double f1 = f.evaluate(1.0);
        if (std::abs(f0) > 1e-12) {
            rep.cond_a = {false, 0.0, std::abs(f0)};
        }
        if (rep.cond_a.pass && std::abs(f1 - 1.0) > 1e-12) {
            rep.cond_a = {false, 1.0, std::abs(f1 - 1.0)};
        }
        double prev = f0;
        for (int i = 0; i < grid_points && rep.cond_a.pass; ++i) {
            const double x = grid_x(i);
            const double v = f.evaluate(x);
            if (!std::isfinite(v) || v < 0.0) {
                rep.cond_a = {false, x, v};
                break;
            }
            if (v <= prev) {
                rep.cond_a = {false, x, prev - v};
                break;
            }
            prev = v;
        }
        if (rep.cond_a.pass && f.evaluate(1.0) <= prev) {
            rep.cond_a = {false, 1.0, prev - f.evaluate(1.0)};
        }
    } catch (const std::exception&) {
        rep.cond_a = {false, 0.0, std::numeric_limits<double>::quiet_NaN()};
    }

    // (B): derivative finite at sampled points and at the one-sided limits
    rep.cond_b.pass = true;
    double max_abs_deriv = 0.0;
    try {
        const double d0 = f.derivative_limit_zero_plus();
        const double d1 = f.derivative_limit_one_minus();
        if (!std::isfinite(d0)) rep.cond_b = {false, 0.0, d0};
        if (rep.cond_b.pass && !std::isfinite(d1)) rep.cond_b = {false, 1.0, d1};
        max_abs_deriv = std::max(std::abs(d0), std::abs(d1));
        for (int i = 0; i < grid_points && rep.cond_b.pass; ++i) {
            const double x = grid_x(i);
            const double d = f.derivative(x);
            if (!std::isfinite(d)) {
                rep.cond_b = {false, x, d};
                break;
            }
            max_abs_deriv = std::max(max_abs_deriv, std::abs(d));
        }
    } catch (const std::exception&) {
        rep.cond_b = {false, 0.0, std::numeric_limits<double>::quiet_NaN()};
    }

    // (C): alpha_inf > 1
    try {
        rep.alpha_inf = alpha_inf(f, grid_points);
        rep.cond_c.pass = rep.alpha_inf > 1.0 + kAlphaTol;
        rep.cond_c.worst_value = rep.alpha_inf;
    } catch (const std::exception&) {
        rep.alpha_inf = std::numeric_limits<double>::quiet_NaN();
        rep.cond_c = {false, 0.0, rep.alpha_inf};
    }

    // Lemma checks. (i) Lipschitz on (0,1) <=> bounded derivative samples.
    rep.lemma_lipschitz = rep.cond_b.pass && std::isfinite(max_abs_deriv);

    // (ii) lim_{x->0+} f(x)/x = f'(0+), both taken as analytic limits
    {
        const double ratio = f.ratio_zero_limit();
        const double deriv = f.derivative_limit_zero_plus();
        rep.lemma_zero_limit =
            std::isfinite(ratio) && std::isfinite(deriv) && std::abs(ratio - deriv) <= 1e-6;
    }

    // (iii) x -> f(x)/x non-decreasing; (iv) f(x) <= x^alpha
    rep.lemma_ratio_monotone = true;
    rep.lemma_power_bound = std::isfinite(rep.alpha_inf);
    try {
        double prev_ratio = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < grid_points; ++i) {
            const double x = grid_x(i);
            const double v = f.evaluate(x);
            const double ratio = v / x;
            if (ratio < prev_ratio - 1e-12) {
                rep.lemma_ratio_monotone = false;
            }
            prev_ratio = std::max(prev_ratio, ratio);
            if (rep.lemma_power_bound && v > std::pow(x, rep.alpha_inf) + 1e-9) {
                rep.lemma_power_bound = false;
            }
        }
    } catch (const std::exception&) {
        rep.lemma_ratio_monotone = false;
        rep.lemma_power_bound = false;
    }
    return rep;
}

}  // namespace polya
