// Addition schedules sigma_n, running totals tau_n, and the two summability
// conditions (i) sum sigma_n/tau_n = inf and (ii) sum (sigma_n/tau_n)^2 < inf.
//
// tau follows the recursion tau_{n+1} = tau_n + sigma_{n+1} with
// tau_0 = ||U_0||_1; prefix sums are cached and grown on demand.

#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

namespace polya {

enum class ScheduleFamily { constant, polynomial, explicit_list };
enum class OnExhaust { cycle, error };

class Schedule {
public:
    // sigma_n = c
    static Schedule constant(std::uint64_t c, double tau0);
    // sigma_n = max(1, round(n^p)), p >= 0
    static Schedule polynomial(double degree, double tau0);
    // sigma_n = values[n-1]; past the end either cycles or errors
    static Schedule explicit_values(std::vector<std::uint64_t> values, double tau0,
                                    OnExhaust on_exhaust = OnExhaust::cycle);

    Schedule(const Schedule& other);
    Schedule& operator=(const Schedule&) = delete;

    ScheduleFamily family() const { return family_; }
    OnExhaust on_exhaust() const { return on_exhaust_; }
    double degree() const { return degree_; }
    std::uint64_t constant_value() const { return constant_; }
    const std::vector<std::uint64_t>& values() const { return values_; }
    double tau0() const { return tau0_; }

    std::uint64_t sigma(std::int64_t n) const;  // n >= 1
    double tau(std::int64_t n) const;           // n >= 0

    // maximal admissible delta_n = sigma_{n+1} / (tau_n + 2 sigma_{n+1}), n >= 0
    double delta(std::int64_t n) const;

    std::string describe() const;

private:
    Schedule() = default;

    ScheduleFamily family_ = ScheduleFamily::constant;
    OnExhaust on_exhaust_ = OnExhaust::cycle;
    std::uint64_t constant_ = 1;
    double degree_ = 0.0;
    std::vector<std::uint64_t> values_;
    double tau0_ = 1.0;

    mutable std::mutex cache_mutex_;
    mutable std::vector<double> tau_cache_;  // tau_cache_[k] = tau_k
};

struct ConditionReport {
    enum class Verdict { diverges, converges, inconclusive };
    Verdict cond_i = Verdict::inconclusive;   // want: diverges
    Verdict cond_ii = Verdict::inconclusive;  // want: converges
    bool analytic = false;                    // verdict derived analytically vs fitted from partial sums
    std::int64_t horizon = 0;                 // effective horizon actually scanned
    double partial_sum_i = 0.0;               // sum_{n<=horizon} sigma_n/tau_n
    double partial_sum_ii = 0.0;              // sum_{n<=horizon} (sigma_n/tau_n)^2
    double ratio_tail = 0.0;                  // mean sigma_n/tau_n over the last half-window

    bool hypotheses_hold() const {
        return cond_i == Verdict::diverges && cond_ii == Verdict::converges;
    }
};

const char* to_string(ConditionReport::Verdict v);

// Analytic verdicts for constant/polynomial families; dyadic-window growth
// heuristic for explicit lists (may honestly report "inconclusive").
ConditionReport check_conditions(const Schedule& s, std::int64_t horizon);

}  // namespace polya
