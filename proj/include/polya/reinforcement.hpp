// Reinforcement functions f: [0,1] -> R_+ and their class-R certification.
//
// A reinforcement function maps a color's proportion to an unnormalized
// selection weight. The simulator accepts any non-negative f with f(0)=0;
// the dominance and fixation guarantees need more: f strictly non-decreasing
// with f(0)=0, f(1)=1 (A), f in C^1((0,1)) with finite one-sided derivatives
// at 0 and 1 (B), and alpha = inf_{x in (0,1)} x f'(x)/f(x) > 1 (C).
// validate_class_r() checks all of this numerically and never throws; it is
// a diagnostic whose report gets stamped into simulation outputs.

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace polya {

enum class ReinforcementFamily { power, power_exp, tabulated };
enum class DerivativeMode { analytic, central_difference };

struct ClassRReport;

class Reinforcement {
public:
    // f(x) = x^a, a > 0
    static Reinforcement power(double exponent);
    // f(x) = x^{2+eps} e^{-x+1}, eps > 0
    static Reinforcement power_exp(double epsilon);
    // monotone piecewise-cubic interpolant through (x, f(x)) pairs on [0,1];
    // requires x strictly increasing, first point (0, ~0), last x = 1,
    // values non-negative and non-decreasing
    static Reinforcement tabulated(std::vector<std::pair<double, double>> points,
                                   DerivativeMode mode = DerivativeMode::central_difference,
                                   double fd_step = 1e-6);

    ReinforcementFamily family() const { return family_; }
    DerivativeMode derivative_mode() const { return mode_; }
    double exponent() const { return param_; }  // power
    double epsilon() const { return param_; }   // power_exp

    // f(x); throws std::domain_error outside [0,1]
    double evaluate(double x) const;
    double operator()(double x) const { return evaluate(x); }

    // f'(x) for 0 < x < 1; boundary limits are requested explicitly below
    double derivative(double x) const;
    double derivative_zero_plus() const;  // lim_{x->0+} f'(x)
    double derivative_one_minus() const;  // lim_{x->1-} f'(x)

    // lim_{x->0+} f(x)/x (equals f'(0+) for class-R members)
    double ratio_zero_limit() const;

    // alpha(x) = x f'(x) / f(x); throws std::domain_error when f(x) = 0 at x > 0
    double alpha_at(double x) const;

    std::string describe() const;

private:
    Reinforcement() = default;

    double evaluate_raw(double x) const;
    double finite_difference(double x) const;
    double hermite_value(double x) const;
    double hermite_derivative(double x) const;
    double analytic_derivative(double x) const;
    // analytic one-sided limits, independent of derivative_mode
    double derivative_limit_zero_plus() const;
    double derivative_limit_one_minus() const;
    double boundary_alpha_zero() const;
    double boundary_alpha_one() const;

    friend double alpha_inf(const Reinforcement&, int);
    friend ClassRReport validate_class_r(const Reinforcement&, int);

    ReinforcementFamily family_ = ReinforcementFamily::power;
    DerivativeMode mode_ = DerivativeMode::analytic;
    double param_ = 1.0;
    double fd_step_ = 1e-6;  // central-difference step; one-sided within 2 steps of a boundary
    // tabulated data and fitted Hermite slopes
    std::vector<double> xs_, ys_, slopes_;
};

struct CheckResult {
    bool pass = false;
    double worst_x = 0.0;      // location of the worst violation (or of the extremum checked)
    double worst_value = 0.0;  // magnitude of that violation / extremal value
};

struct ClassRReport {
    CheckResult cond_a;  // strict monotonicity, f(0)=0, f(1)=1, finite non-negative values
    CheckResult cond_b;  // derivative finite on (0,1) and at the one-sided limits
    CheckResult cond_c;  // alpha_inf > 1 + 1e-9
    double alpha_inf = 0.0;
    // Lemma checks: (i) Lipschitz (bounded derivative), (ii) lim f(x)/x = f'(0+),
    // (iii) f(x)/x non-decreasing, (iv) f(x) <= x^alpha
    bool lemma_lipschitz = false;
    bool lemma_zero_limit = false;
    bool lemma_ratio_monotone = false;
    bool lemma_power_bound = false;

    bool all_pass() const {
        return cond_a.pass && cond_b.pass && cond_c.pass && lemma_lipschitz &&
               lemma_zero_limit && lemma_ratio_monotone && lemma_power_bound;
    }
};

// inf over (0,1) of x f'(x)/f(x), scanned on a uniform grid over
// (1e-6, 1-1e-6) together with the one-sided boundary limits.
// Exact (no scan) for the power family, where alpha(x) is constant.
double alpha_inf(const Reinforcement& f, int grid_points = 10001);

// Numeric certification of membership in class R. Never throws: violations
// (including evaluation failures) are recorded in the report.
ClassRReport validate_class_r(const Reinforcement& f, int grid_points = 10001);

}  // namespace polya
