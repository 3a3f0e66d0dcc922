#include "polya/meanfield.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace polya {

namespace {

double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

double one_sided_derivative(const Reinforcement& f, double x) {
    if (x <= 0.0) return f.derivative_zero_plus();
    if (x >= 1.0) return f.derivative_one_minus();
    return f.derivative(x);
}

// adaptive Simpson with Richardson correction
double simpson_segment(const std::function<double(double)>& g, double a, double b, double fa,
                       double fm, double fb, double whole, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = g(lm), frm = g(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (std::abs(left + right - whole) <= 15.0 * eps) {
        return left + right + (left + right - whole) / 15.0;
    }
    if (depth <= 0) {
        throw std::runtime_error("quadrature failed to converge");
    }
    return simpson_segment(g, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
           simpson_segment(g, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& g, double a, double b, double eps) {
    if (b <= a) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = g(a), fm = g(m), fb = g(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_segment(g, a, b, fa, fm, fb, whole, eps, 40);
}

}  // namespace

MeanFieldModel::MeanFieldModel(std::size_t dim, Reinforcement fn) : d(dim), f(std::move(fn)) {
    if (dim < 2) throw std::invalid_argument("mean-field model requires d >= 2");
}

void mean_field(const MeanFieldModel& model, std::span<const double> y, std::span<double> out) {
    if (y.size() != model.d || out.size() != model.d) {
        throw std::invalid_argument("mean_field: dimension mismatch");
    }
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < model.d; ++i) {
        out[i] = model.f.evaluate(clamp01(y[i]));
        weight_sum += out[i];
    }
    if (!(weight_sum > 0.0)) {
        std::ostringstream os;
        os << "mean field undefined: all weights vanish at y =";
        for (double v : y) os << ' ' << v;
        throw std::runtime_error(os.str());
    }
    for (std::size_t i = 0; i < model.d; ++i) out[i] = out[i] / weight_sum - y[i];
}

std::vector<double> mean_field(const MeanFieldModel& model, const std::vector<double>& y) {
    std::vector<double> out(model.d);
    mean_field(model, y, out);
    return out;
}

std::vector<EquilibriumPoint> equilibria(const MeanFieldModel& model) {
    const std::size_t d = model.d;
    if (d > 20) {
        throw std::invalid_argument(
            "equilibria: 2^d - 1 enumeration is capped at d = 20; enumerate by support size instead");
    }
    std::vector<EquilibriumPoint> points;
    points.reserve((std::size_t(1) << d) - 1);
    for (std::uint32_t mask = 1; mask < (std::uint32_t(1) << d); ++mask) {
        EquilibriumPoint p;
        p.coordinates.assign(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            if (mask & (std::uint32_t(1) << i)) p.support.push_back(i);
        }
        const double v = 1.0 / double(p.support.size());
        for (std::size_t i : p.support) p.coordinates[i] = v;
        points.push_back(std::move(p));
    }
    return points;
}

std::vector<std::vector<double>> mean_field_jacobian(const MeanFieldModel& model,
                                                     const std::vector<double>& y) {
    const std::size_t d = model.d;
    if (y.size() != d) throw std::invalid_argument("mean_field_jacobian: dimension mismatch");
    std::vector<double> fv(d), dv(d);
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        fv[i] = model.f.evaluate(clamp01(y[i]));
        dv[i] = one_sided_derivative(model.f, y[i]);
        if (!std::isfinite(dv[i])) {
            std::ostringstream os;
            os << "mean_field_jacobian: derivative not finite at coordinate value " << y[i];
            throw std::runtime_error(os.str());
        }
        weight_sum += fv[i];
    }
    if (!(weight_sum > 0.0)) throw std::runtime_error("mean_field_jacobian: all weights vanish");
    const double w2 = weight_sum * weight_sum;
    std::vector<std::vector<double>> jac(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            double v = -fv[i] * dv[j] / w2;
            if (i == j) v += dv[i] / weight_sum - 1.0;
            jac[i][j] = v;
        }
    }
    return jac;
}

const char* to_string(Stability s) {
    switch (s) {
        case Stability::unstable: return "unstable";
        case Stability::stable: return "stable";
        case Stability::marginal: return "marginal";
    }
    return "marginal";
}

StabilityReport jacobian_stability(const MeanFieldModel& model, const std::vector<double>& y,
                                   double tol) {
    const std::size_t d = model.d;
    StabilityReport rep;
    rep.point = y;

    const auto jac = mean_field_jacobian(model, y);
    Eigen::MatrixXd J(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) J(Eigen::Index(i), Eigen::Index(j)) = jac[i][j];
    }

    // orthonormal basis of {v : sum v_i = 0} (Helmert vectors)
    Eigen::MatrixXd B(d, d - 1);
    B.setZero();
    for (std::size_t k = 1; k < d; ++k) {
        const double norm = 1.0 / std::sqrt(double(k) * double(k + 1));
        for (std::size_t i = 0; i < k; ++i) B(Eigen::Index(i), Eigen::Index(k - 1)) = norm;
        B(Eigen::Index(k), Eigen::Index(k - 1)) = -double(k) * norm;
    }
    Eigen::MatrixXd A = B.transpose() * J * B;

    rep.tangent_jacobian.assign(d - 1, std::vector<double>(d - 1));
    for (std::size_t i = 0; i + 1 < d; ++i) {
        for (std::size_t j = 0; j + 1 < d; ++j) {
            rep.tangent_jacobian[i][j] = A(Eigen::Index(i), Eigen::Index(j));
        }
    }

    Eigen::EigenSolver<Eigen::MatrixXd> solver(A, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("jacobian_stability: eigenvalue computation failed");
    }
    std::vector<std::pair<double, double>> eigs;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        eigs.emplace_back(solver.eigenvalues()[i].real(), solver.eigenvalues()[i].imag());
    }
    std::sort(eigs.begin(), eigs.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second > b.second;
    });
    for (const auto& [re, im] : eigs) {
        rep.eigen_real.push_back(re);
        rep.eigen_imag.push_back(im);
    }
    rep.spectral_abscissa = rep.eigen_real.front();
    rep.classification = rep.spectral_abscissa > tol    ? Stability::unstable
                         : rep.spectral_abscissa < -tol ? Stability::stable
                                                        : Stability::marginal;

    // closed-form cross-check at uniform-support equilibria: eliminating a
    // coordinate j, the reduced derivative of Psi_i along x_i is
    // alpha(y_i) - f(y_i) (f'(y_i) - f'(y_j)) / W^2.
    std::vector<double> h(d);
    mean_field(model, y, h);
    double h_inf = 0.0;
    for (double v : h) h_inf = std::max(h_inf, std::abs(v));
    if (h_inf < 1e-10) {
        rep.at_equilibrium = true;
        std::size_t rep_coord = d, zero_coord = d;
        for (std::size_t i = 0; i < d; ++i) {
            if (y[i] > 0.0 && rep_coord == d) rep_coord = i;
            if (y[i] == 0.0 && zero_coord == d) zero_coord = i;
        }
        const std::size_t elim = zero_coord < d ? zero_coord : d - 1;
        if (rep_coord < d && elim != rep_coord) {
            double weight_sum = 0.0;
            for (std::size_t i = 0; i < d; ++i) weight_sum += model.f.evaluate(clamp01(y[i]));
            const double fi = model.f.evaluate(y[rep_coord]);
            const double di = one_sided_derivative(model.f, y[rep_coord]);
            const double dj = one_sided_derivative(model.f, y[elim]);
            // ambient Jacobian of Psi = jac + I on the diagonal
            const double psi_ii = jac[rep_coord][rep_coord] + 1.0;
            const double psi_ij = jac[rep_coord][elim];
            rep.diagonal_computed = psi_ii - psi_ij;
            rep.diagonal_expected =
                y[rep_coord] * di / fi - fi * (di - dj) / (weight_sum * weight_sum);
            rep.diagonal_check_pass =
                std::abs(rep.diagonal_computed - rep.diagonal_expected) <= 1e-8;
        }
    }
    return rep;
}

FlowResult flow(const MeanFieldModel& model, std::vector<double> y0, const FlowOptions& options) {
    const std::size_t d = model.d;
    if (y0.size() != d) throw std::invalid_argument("flow: dimension mismatch");
    if (!(options.dt > 0.0)) throw std::invalid_argument("flow: dt must be > 0");
    double sum0 = std::accumulate(y0.begin(), y0.end(), 0.0);
    if (!(sum0 > 0.0)) throw std::invalid_argument("flow: start must have positive mass");
    for (double& v : y0) v = clamp01(v / sum0);

    FlowResult result;
    std::vector<double> y = y0;
    std::vector<double> k1(d), k2(d), k3(d), k4(d), tmp(d), h(d);

    auto record = [&](double t) {
        FlowPoint pt;
        pt.t = t;
        pt.y = y;
        pt.lyapunov = options.with_lyapunov ? lyapunov_F(model, y) : 0.0;
        result.points.push_back(std::move(pt));
    };

    const auto steps = std::int64_t(std::ceil(options.T / options.dt - 1e-12));
    record(0.0);
    for (std::int64_t n = 0; n < steps; ++n) {
        mean_field(model, y, k1);
        double h_inf = 0.0;
        for (double v : k1) h_inf = std::max(h_inf, std::abs(v));
        result.final_h_inf = h_inf;
        if (h_inf < options.stop_threshold) {
            result.converged = true;
            return result;
        }
        const double dt = options.dt;
        for (std::size_t i = 0; i < d; ++i) tmp[i] = clamp01(y[i] + 0.5 * dt * k1[i]);
        mean_field(model, tmp, k2);
        for (std::size_t i = 0; i < d; ++i) tmp[i] = clamp01(y[i] + 0.5 * dt * k2[i]);
        mean_field(model, tmp, k3);
        for (std::size_t i = 0; i < d; ++i) tmp[i] = clamp01(y[i] + dt * k3[i]);
        mean_field(model, tmp, k4);
        for (std::size_t i = 0; i < d; ++i) {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }

        double sum = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            if (y[i] < 0.0) y[i] = 0.0;
            sum += y[i];
        }
        if (std::abs(sum - 1.0) > options.drift_tolerance) {
            std::ostringstream os;
            os << "flow: simplex drift " << std::abs(sum - 1.0) << " at t=" << double(n + 1) * dt
               << " exceeds " << options.drift_tolerance << "; reduce dt";
            throw std::runtime_error(os.str());
        }
        for (std::size_t i = 0; i < d; ++i) y[i] /= sum;
        record(double(n + 1) * dt);
    }
    mean_field(model, y, h);
    double h_inf = 0.0;
    for (double v : h) h_inf = std::max(h_inf, std::abs(v));
    result.final_h_inf = h_inf;
    result.converged = h_inf < options.stop_threshold;
    return result;
}

double lyapunov_F(const MeanFieldModel& model, std::span<const double> y) {
    if (y.size() != model.d) throw std::invalid_argument("lyapunov_F: dimension mismatch");
    const double limit0 = model.f.ratio_zero_limit();  // f(z)/z extends continuously to 0
    const auto& f = model.f;
    const std::function<double(double)> integrand = [&](double z) {
        return z <= 0.0 ? limit0 : f.evaluate(z) / z;
    };
    double total = 0.0;
    for (std::size_t i = 0; i < model.d; ++i) {
        const double yi = clamp01(y[i]);
        if (yi == 0.0) continue;
        try {
            total += adaptive_simpson(integrand, 0.0, yi, 1e-10);
        } catch (const std::runtime_error&) {
            std::ostringstream os;
            os << "lyapunov_F: quadrature failed on coordinate " << i + 1 << " (y = " << yi << ")";
            throw std::runtime_error(os.str());
        }
    }
    return total;
}

}  // namespace polya
