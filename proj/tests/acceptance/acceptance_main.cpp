// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Statistical targets run on pinned master seeds; tolerances and
// thresholds are fixed here, not tuned at runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "polya/batch.hpp"
#include "polya/config.hpp"
#include "polya/meanfield.hpp"
#include "polya/rng.hpp"
#include "polya/urn.hpp"

using namespace polya;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void require(Outcome& out, bool cond, const std::string& label) {
    if (!cond) {
        out.pass = false;
        out.detail << " [failed: " << label << "]";
    }
}

json batch_config(int d, json reinforcement, json schedule, std::int64_t steps,
                  std::int64_t replications, std::uint64_t seed) {
    json u0 = json::array();
    for (int i = 0; i < d; ++i) u0.push_back(1.0);
    return json{{"d", d},
                {"initial_composition", u0},
                {"reinforcement", std::move(reinforcement)},
                {"schedule", std::move(schedule)},
                {"steps", steps},
                {"replications", replications},
                {"master_seed", seed},
                {"dominance_epsilon", 0.05},
                {"fixation_window", 10000}};
}

double linf(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// finite-difference Jacobian of h, one-sided at the boundary
std::vector<std::vector<double>> fd_jacobian(const MeanFieldModel& model,
                                             const std::vector<double>& y) {
    const std::size_t d = model.d;
    const double h = 1e-6;
    std::vector<std::vector<double>> jac(d, std::vector<double>(d));
    for (std::size_t j = 0; j < d; ++j) {
        std::vector<double> hi = y, lo = y;
        if (y[j] + h <= 1.0) hi[j] += h;
        if (y[j] - h >= 0.0) lo[j] -= h;
        const auto fhi = mean_field(model, hi);
        const auto flo = mean_field(model, lo);
        const double width = hi[j] - lo[j];
        for (std::size_t i = 0; i < d; ++i) jac[i][j] = (fhi[i] - flo[i]) / width;
    }
    return jac;
}

// ---------------------------------------------------------------- criteria

// equilibrium structure: 2^d - 1 points, zero drift, under a second
Outcome criterion_1() {
    Outcome out;
    const auto start = Clock::now();
    const std::vector<Reinforcement> fs{Reinforcement::power(2.0), Reinforcement::power(3.0),
                                        Reinforcement::power_exp(0.1)};
    for (std::size_t d = 2; d <= 6; ++d) {
        for (const auto& f : fs) {
            const MeanFieldModel model(d, f);
            const auto points = equilibria(model);
            require(out, points.size() == (std::size_t(1) << d) - 1, "count != 2^d - 1");
            for (const auto& p : points) {
                double h_inf = 0.0;
                for (double v : mean_field(model, p.coordinates)) {
                    h_inf = std::max(h_inf, std::abs(v));
                }
                require(out, h_inf < 1e-12, "||h(e)||_inf >= 1e-12");
            }
        }
    }
    const double elapsed = seconds_since(start);
    require(out, elapsed < 1.0, "runtime >= 1 s");
    out.detail << "d=2..6 x 3 reinforcements, all 2^d-1 with ||h||_inf < 1e-12, "
               << std::fixed << elapsed << "s";
    return out;
}

// class-R certification: alpha values and the Lemma bounds on a dense grid
Outcome criterion_2() {
    Outcome out;
    const auto start = Clock::now();
    for (double a : {1.5, 2.0, 3.0, 5.0}) {
        require(out, std::abs(alpha_inf(Reinforcement::power(a)) - a) <= 1e-9,
                "alpha_inf(power) offset > 1e-9");
    }
    for (double eps : {0.1, 0.5}) {
        require(out, std::abs(alpha_inf(Reinforcement::power_exp(eps)) - (1.0 + eps)) <= 1e-6,
                "alpha_inf(power_exp) offset > 1e-6");
    }

    std::vector<Reinforcement> members;
    for (double a : {1.5, 2.0, 3.0, 5.0}) members.push_back(Reinforcement::power(a));
    for (double eps : {0.1, 0.5}) members.push_back(Reinforcement::power_exp(eps));
    {
        std::vector<std::pair<double, double>> pts;
        for (int i = 0; i <= 100; ++i) {
            const double x = double(i) / 100.0;
            pts.emplace_back(x, x * x);
        }
        members.push_back(Reinforcement::tabulated(pts));
    }
    const int grid = 10000;
    for (const auto& f : members) {
        const double alpha = alpha_inf(f);
        require(out, alpha > 1.0, "alpha_inf <= 1");
        double prev_ratio = 0.0;
        bool bound_ok = true, ratio_ok = true;
        for (int i = 1; i <= grid; ++i) {
            const double x = double(i) / double(grid);
            const double v = f.evaluate(x);
            bound_ok = bound_ok && v <= std::pow(x, alpha) + 1e-9;
            const double ratio = v / x;
            ratio_ok = ratio_ok && ratio >= prev_ratio - 1e-12;
            prev_ratio = ratio;
        }
        require(out, bound_ok, "f(x) > x^alpha + 1e-9 somewhere");
        require(out, ratio_ok, "f(x)/x decreases somewhere");
    }
    const double elapsed = seconds_since(start);
    require(out, elapsed < 1.0, "runtime >= 1 s");
    out.detail << "alpha exact for power, 1+eps for power_exp; lemma bounds on "
               << members.size() << " members at 10^4 points, " << std::fixed << elapsed << "s";
    return out;
}

// dominance at desk scale (shared batch with criterion 4)
const BatchReport& dominance_batch() {
    static const BatchReport report = [] {
        const auto cfg = ExperimentConfig::from_json(
            batch_config(3, {{"family", "power"}, {"exponent", 2.0}},
                         {{"family", "constant"}, {"c", 1}}, 100000, 500, 20250808));
        return run_batch(cfg).report;
    }();
    return report;
}

Outcome criterion_3() {
    Outcome out;
    const auto start = Clock::now();
    const auto& report = dominance_batch();
    std::int64_t dominated = 0;
    for (const auto& run : report.runs) {
        if (run.dominance_margin > 0.95) ++dominated;
    }
    const double frac = double(dominated) / double(report.runs.size());
    require(out, frac >= 0.99, "dominated fraction < 0.99");
    for (double freq : report.dominance_frequency) {
        require(out, std::abs(freq - 1.0 / 3.0) <= 0.07, "per-color frequency outside 1/3 +- 0.07");
    }
    const double elapsed = seconds_since(start);
    require(out, elapsed < 60.0, "runtime >= 60 s");
    out.detail << "max theta > 0.95 in " << frac * 100 << "% of 500 runs; freqs";
    for (double freq : report.dominance_frequency) out.detail << ' ' << freq;
    out.detail << "; " << std::fixed << elapsed << "s";
    return out;
}

Outcome criterion_4() {
    Outcome out;
    const auto& report = dominance_batch();
    require(out, report.fixation_fraction >= 0.95, "fixation fraction < 0.95");
    bool fixated_implies_dominated = true;
    for (const auto& run : report.runs) {
        if (run.fixation && !run.dominant_color) fixated_implies_dominated = false;
    }
    require(out, fixated_implies_dominated, "a fixated run was not dominated");
    out.detail << "fixation fraction " << report.fixation_fraction
               << " over window 10^4; every fixated run dominated";
    if (report.fixation_onset_median) {
        out.detail << "; onset median " << *report.fixation_onset_median;
    }
    return out;
}

// growing addition schedule sigma_n = n
Outcome criterion_5() {
    Outcome out;
    const auto start = Clock::now();
    const auto cfg = ExperimentConfig::from_json(
        batch_config(2, {{"family", "power"}, {"exponent", 2.0}},
                     {{"family", "polynomial"}, {"p", 1.0}}, 3000, 300, 20250809));
    const auto report = run_batch(cfg).report;
    std::int64_t dominated = 0;
    for (const auto& run : report.runs) {
        if (run.dominance_margin > 0.95) ++dominated;
    }
    const double frac = double(dominated) / double(report.runs.size());
    require(out, frac >= 0.99, "dominated fraction < 0.99");
    require(out, report.conditions.cond_i == ConditionReport::Verdict::diverges,
            "condition (i) not 'diverges'");
    require(out, report.conditions.cond_ii == ConditionReport::Verdict::converges,
            "condition (ii) not 'converges'");
    require(out, report.runs.front().final_tau > 4.0e6, "tau_N below 4.5e6 scale");
    out.detail << "dominated fraction " << frac << ", tau_N = " << report.runs.front().final_tau
               << ", verdicts diverges/converges; " << std::fixed << seconds_since(start) << "s";
    return out;
}

// exponential schedules are rejected by condition (ii)
Outcome criterion_6() {
    Outcome out;
    json values = json::array();
    for (int n = 1; n <= 40; ++n) values.push_back(std::int64_t(1) << n);
    auto cfg_json = batch_config(2, {{"family", "power"}, {"exponent", 2.0}},
                                 {{"family", "explicit"}, {"values", values}, {"on_exhaust", "error"}},
                                 40, 2, 20250810);
    const auto report = run_batch(ExperimentConfig::from_json(cfg_json)).report;
    require(out, report.conditions.cond_ii == ConditionReport::Verdict::diverges,
            "condition (ii) verdict not 'diverges'");
    bool stamped = false;
    for (const auto& w : report.warnings) {
        stamped = stamped || w.find("condition (ii)") != std::string::npos;
    }
    require(out, stamped, "report carries no hypothesis-violation stamp");
    out.detail << "sigma_n = 2^n: cond (ii) diverges, warning stamped in the simulate report";
    return out;
}

// martingale L2 bound
Outcome criterion_7() {
    Outcome out;
    const auto start = Clock::now();
    auto cfg_json = batch_config(3, {{"family", "power"}, {"exponent", 2.0}},
                                 {{"family", "constant"}, {"c", 1}}, 10000, 2000, 20250811);
    cfg_json["martingale_eta"] = 0;
    const auto report = run_batch(ExperimentConfig::from_json(cfg_json)).report;
    const std::size_t R = report.runs.size();
    double mean = 0.0, m2 = 0.0;
    for (const auto& run : report.runs) {
        mean += run.martingale_sq_norm;
        m2 += run.martingale_sq_norm * run.martingale_sq_norm;
    }
    mean /= double(R);
    const double var = m2 / double(R) - mean * mean;
    const double se = std::sqrt(std::max(0.0, var) / double(R));
    const double bound = 3.0 / 3.0 + 5.0 * se;  // d / tau_0 plus sampling noise
    require(out, mean <= bound, "mean ||M_N||^2 exceeds d/tau_0 + 5 SE");
    out.detail << "mean ||M_N||^2 = " << mean << " <= " << bound << " (R=2000); " << std::fixed
               << seconds_since(start) << "s";
    return out;
}

// flow convergence and Lyapunov ascent
Outcome criterion_8() {
    Outcome out;
    const auto start = Clock::now();
    const MeanFieldModel model(3, Reinforcement::power(2.0));
    const auto points = equilibria(model);
    RngStream rng(424242);
    FlowOptions opts;  // dt = 0.01, T = 200
    double worst_end = 0.0;
    bool monotone = true;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> y0(3);
        double total = 0.0;
        for (auto& v : y0) {
            v = rng.exponential();  // Dirichlet(1,1,1) start
            total += v;
        }
        for (auto& v : y0) v /= total;
        const auto flow_result = flow(model, y0, opts);
        double best = 1e9;
        for (const auto& p : points) {
            best = std::min(best, linf(flow_result.points.back().y, p.coordinates));
        }
        worst_end = std::max(worst_end, best);
        for (std::size_t k = 1; k < flow_result.points.size(); ++k) {
            monotone = monotone && flow_result.points[k].lyapunov >=
                                       flow_result.points[k - 1].lyapunov - 1e-9;
        }
    }
    require(out, worst_end < 1e-3, "a trajectory ended > 1e-3 from every equilibrium");
    require(out, monotone, "F decreased by more than 1e-9 along a step");
    const double elapsed = seconds_since(start);
    require(out, elapsed < 10.0, "runtime >= 10 s");
    out.detail << "100 Dirichlet starts, worst endpoint distance " << worst_end
               << ", F non-decreasing; " << std::fixed << elapsed << "s";
    return out;
}

// stability dichotomy and Jacobian cross-checks
Outcome criterion_9() {
    Outcome out;
    std::mt19937_64 gen(90210);
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    for (const auto& f : {Reinforcement::power(2.0), Reinforcement::power_exp(0.1)}) {
        const double alpha = alpha_inf(f);
        for (std::size_t d : {2u, 3u}) {
            const MeanFieldModel model(d, f);
            for (const auto& p : equilibria(model)) {
                const auto rep = jacobian_stability(model, p.coordinates);
                if (!p.trivial()) {
                    require(out, rep.spectral_abscissa > 0.0, "nontrivial equilibrium not unstable");
                }
                if (p.support.size() == d) {
                    require(out, rep.spectral_abscissa >= alpha - 1.0 - 1e-6,
                            "uniform leading eigenvalue < alpha - 1 - 1e-6");
                }
                const auto analytic = mean_field_jacobian(model, p.coordinates);
                const auto numeric = fd_jacobian(model, p.coordinates);
                for (std::size_t i = 0; i < d; ++i) {
                    for (std::size_t j = 0; j < d; ++j) {
                        require(out, std::abs(analytic[i][j] - numeric[i][j]) < 1e-4,
                                "analytic vs FD Jacobian > 1e-4 at an equilibrium");
                    }
                }
            }
            for (int k = 0; k < 25; ++k) {
                std::vector<double> y(d);
                double total = 0.0;
                for (auto& v : y) {
                    v = unif(gen);
                    total += v;
                }
                for (auto& v : y) v /= total;
                const auto analytic = mean_field_jacobian(model, y);
                const auto numeric = fd_jacobian(model, y);
                for (std::size_t i = 0; i < d; ++i) {
                    for (std::size_t j = 0; j < d; ++j) {
                        require(out, std::abs(analytic[i][j] - numeric[i][j]) < 1e-4,
                                "analytic vs FD Jacobian > 1e-4 at an interior point");
                    }
                }
            }
        }
    }
    out.detail << "d in {2,3}, power(2) and power_exp(0.1): nontrivial unstable, uniform leading "
                  "eigenvalue >= alpha-1, Jacobians within 1e-4 of FD";
    return out;
}

// recursion identity on randomized configurations
Outcome criterion_10() {
    Outcome out;
    std::mt19937_64 gen(1234);
    std::uniform_int_distribution<int> d_dist(2, 4);
    std::uniform_int_distribution<int> f_dist(0, 2);
    std::uniform_int_distribution<int> s_dist(0, 3);
    std::uniform_int_distribution<int> u_dist(1, 3);
    double worst = 0.0;
    for (int cfg_idx = 0; cfg_idx < 10; ++cfg_idx) {
        const int d = d_dist(gen);
        Reinforcement f = Reinforcement::power(2.0);
        switch (f_dist(gen)) {
            case 0: f = Reinforcement::power(2.0); break;
            case 1: f = Reinforcement::power(3.0); break;
            case 2: f = Reinforcement::power_exp(0.25); break;
        }
        std::vector<double> u0(d);
        double tau0 = 0.0;
        for (auto& v : u0) {
            v = double(u_dist(gen));
            tau0 += v;
        }
        const Schedule s = [&]() -> Schedule {
            switch (s_dist(gen)) {
                case 1: return Schedule::constant(3, tau0);
                case 2: return Schedule::polynomial(0.5, tau0);
                case 3: return Schedule::polynomial(1.0, tau0);
                default: return Schedule::constant(1, tau0);
            }
        }();
        RunOptions opt;
        opt.steps = 200;
        opt.snapshots = 100000;
        opt.record_draws = true;
        opt.master_seed = 999000 + std::uint64_t(cfg_idx);
        const auto result = run_urn(u0, f, s, opt);
        for (std::size_t n = 0; n < 200; ++n) {
            const auto& prev = result.trajectory[n];
            const auto& next = result.trajectory[n + 1];
            const auto& rec = result.draws[n];
            const double sigma = double(rec.sigma);
            for (int i = 0; i < d; ++i) {
                const double h_i = rec.probs[std::size_t(i)] - prev.theta[std::size_t(i)];
                const double rhs =
                    sigma / next.tau *
                    (h_i + rec.martingale_increment[std::size_t(i)] / sigma);
                worst = std::max(worst,
                                 std::abs(next.theta[std::size_t(i)] - prev.theta[std::size_t(i)] - rhs));
            }
        }
    }
    require(out, worst < 1e-10, "recursion identity residual >= 1e-10");
    out.detail << "10 random configs, worst per-step residual " << worst;
    return out;
}

// determinism across thread counts
Outcome criterion_11() {
    Outcome out;
    const auto cfg = ExperimentConfig::from_json(
        batch_config(3, {{"family", "power"}, {"exponent", 2.0}},
                     {{"family", "constant"}, {"c", 1}}, 20000, 100, 20250812));
    const std::string one = run_batch(cfg, 1).report.to_json().dump();
    const std::string two = run_batch(cfg, 2).report.to_json().dump();
    const std::string four = run_batch(cfg, 4).report.to_json().dump();
    const std::string again = run_batch(cfg, 2).report.to_json().dump();
    require(out, one == two, "1-thread vs 2-thread reports differ");
    require(out, two == four, "2-thread vs 4-thread reports differ");
    require(out, two == again, "re-run with same seed differs");
    out.detail << "reports byte-identical across 1/2/4 threads and across re-runs ("
               << one.size() << " bytes)";
    return out;
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        std::function<Outcome()> fn;
    };
    const std::vector<Entry> criteria{
        {1, "equilibrium structure", criterion_1},
        {2, "class-R certification", criterion_2},
        {3, "dominance", criterion_3},
        {4, "fixation", criterion_4},
        {5, "time-dependent schedule", criterion_5},
        {6, "exponential rejection", criterion_6},
        {7, "martingale L2 bound", criterion_7},
        {8, "flow convergence and Lyapunov ascent", criterion_8},
        {9, "stability dichotomy", criterion_9},
        {10, "recursion identity", criterion_10},
        {11, "determinism", criterion_11},
    };

    int failures = 0;
    for (const auto& entry : criteria) {
        Outcome out;
        try {
            out = entry.fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail << "exception: " << e.what();
        }
        if (!out.pass) ++failures;
        std::cout << (out.pass ? "[PASS]" : "[FAIL]") << " criterion " << entry.id << " ("
                  << entry.name << "): " << out.detail.str() << std::endl;
    }
    if (failures == 0) {
        std::cout << "acceptance: all " << criteria.size() << " criteria passed" << std::endl;
    } else {
        std::cout << "acceptance: " << failures << " criterion(s) failed" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
