// Deterministic side of the stochastic approximation: the mean-field drift
// h(y) = f_d(y)/||f_d(y)||_1 - y on the simplex, its equilibria (uniform
// distributions over nonempty support sets), Jacobian-based stability
// classification on the tangent space {v : sum v_i = 0}, the ODE flow of
// dy/dt = h(y), and the potential F(y) = sum_i int_0^{y_i} f(z)/z dz, whose
// negative is a strict Lyapunov function for the flow.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "polya/reinforcement.hpp"

namespace polya {

struct MeanFieldModel {
    std::size_t d = 2;
    Reinforcement f;

    MeanFieldModel(std::size_t dim, Reinforcement fn);
};

// h(y); y must be non-negative with at least one strictly positive weight.
// y need not lie exactly on the simplex (finite-difference probes step off it).
void mean_field(const MeanFieldModel& model, std::span<const double> y, std::span<double> out);
std::vector<double> mean_field(const MeanFieldModel& model, const std::vector<double>& y);

struct EquilibriumPoint {
    std::vector<std::size_t> support;  // 0-based color indices
    std::vector<double> coordinates;   // 1/|support| on the support, 0 elsewhere
    bool trivial() const { return support.size() == 1; }
};

// All 2^d - 1 equilibria; throws for d > 20 (use support-size enumeration
// for larger d).
std::vector<EquilibriumPoint> equilibria(const MeanFieldModel& model);

// Ambient d x d Jacobian of h, with one-sided f' at coordinates on {0, 1}.
std::vector<std::vector<double>> mean_field_jacobian(const MeanFieldModel& model,
                                                     const std::vector<double>& y);

enum class Stability { unstable, stable, marginal };
const char* to_string(Stability s);

struct StabilityReport {
    std::vector<double> point;
    std::vector<std::vector<double>> tangent_jacobian;  // (d-1) x (d-1)
    std::vector<double> eigen_real;  // sorted descending
    std::vector<double> eigen_imag;  // matching order
    double spectral_abscissa = 0.0;
    Stability classification = Stability::marginal;
    // At uniform-support equilibria the reduced derivative of the selection
    // probability has a closed form; both values are recorded as a cross-check.
    bool at_equilibrium = false;
    bool diagonal_check_pass = true;
    double diagonal_computed = 0.0;
    double diagonal_expected = 0.0;
};

StabilityReport jacobian_stability(const MeanFieldModel& model, const std::vector<double>& y,
                                   double tol = 1e-8);

struct FlowOptions {
    double T = 200.0;
    double dt = 0.01;
    double stop_threshold = 1e-10;   // stop once ||h(y)||_inf drops below this
    double drift_tolerance = 1e-6;   // max |sum y - 1| before renormalizing
    bool with_lyapunov = true;       // evaluate F at every recorded point
};

struct FlowPoint {
    double t = 0.0;
    std::vector<double> y;
    double lyapunov = 0.0;  // F(y), when requested
};

struct FlowResult {
    std::vector<FlowPoint> points;
    bool converged = false;
    double final_h_inf = 0.0;
};

// Classical RK4 with clamp-to-simplex renormalization after every step.
FlowResult flow(const MeanFieldModel& model, std::vector<double> y0, const FlowOptions& options);

// F(y) by adaptive quadrature (absolute tolerance 1e-10); the integrand
// f(z)/z is extended at 0 by its limit f'(0+).
double lyapunov_F(const MeanFieldModel& model, std::span<const double> y);

}  // namespace polya
