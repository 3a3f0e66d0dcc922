#include "polya/schedule.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace polya {

namespace {
constexpr double kMaxExactInteger = 9007199254740992.0;  // 2^53

void check_tau0(double tau0) {
    if (!(tau0 > 0.0) || !std::isfinite(tau0)) {
        throw std::invalid_argument("schedule requires tau0 > 0");
    }
}
}  // namespace

Schedule Schedule::constant(std::uint64_t c, double tau0) {
    if (c < 1) throw std::invalid_argument("constant schedule requires c >= 1");
    check_tau0(tau0);
    Schedule s;
    s.family_ = ScheduleFamily::constant;
    s.constant_ = c;
    s.tau0_ = tau0;
    s.tau_cache_.push_back(tau0);
    return s;
}

Schedule Schedule::polynomial(double degree, double tau0) {
    if (!(degree >= 0.0) || !std::isfinite(degree)) {
        throw std::invalid_argument("polynomial schedule requires degree >= 0");
    }
    check_tau0(tau0);
    Schedule s;
    s.family_ = ScheduleFamily::polynomial;
    s.degree_ = degree;
    s.tau0_ = tau0;
    s.tau_cache_.push_back(tau0);
    return s;
}

Schedule Schedule::explicit_values(std::vector<std::uint64_t> values, double tau0,
                                   OnExhaust on_exhaust) {
    if (values.empty()) throw std::invalid_argument("explicit schedule requires at least one value");
    for (auto v : values) {
        if (v < 1) throw std::invalid_argument("explicit schedule values must be >= 1");
    }
    check_tau0(tau0);
    Schedule s;
    s.family_ = ScheduleFamily::explicit_list;
    s.values_ = std::move(values);
    s.on_exhaust_ = on_exhaust;
    s.tau0_ = tau0;
    s.tau_cache_.push_back(tau0);
    return s;
}

Schedule::Schedule(const Schedule& other)
    : family_(other.family_),
      on_exhaust_(other.on_exhaust_),
      constant_(other.constant_),
      degree_(other.degree_),
      values_(other.values_),
      tau0_(other.tau0_) {
    std::lock_guard<std::mutex> lock(other.cache_mutex_);
    tau_cache_ = other.tau_cache_;
}

std::uint64_t Schedule::sigma(std::int64_t n) const {
    if (n < 1) throw std::invalid_argument("sigma is defined for n >= 1");
    switch (family_) {
        case ScheduleFamily::constant:
            return constant_;
        case ScheduleFamily::polynomial: {
            const double v = std::round(std::pow(double(n), degree_));
            if (!(v < kMaxExactInteger)) {
                std::ostringstream os;
                os << "sigma(" << n << ") = n^" << degree_ << " exceeds the exact-integer range";
                throw std::overflow_error(os.str());
            }
            return v < 1.0 ? 1 : std::uint64_t(v);
        }
        case ScheduleFamily::explicit_list: {
            const std::uint64_t idx = std::uint64_t(n - 1);
            if (idx < values_.size()) return values_[idx];
            if (on_exhaust_ == OnExhaust::cycle) return values_[idx % values_.size()];
            std::ostringstream os;
            os << "explicit schedule exhausted at n=" << n << " (have " << values_.size()
               << " values, on_exhaust=error)";
            throw std::out_of_range(os.str());
        }
    }
    return 1;
}

double Schedule::tau(std::int64_t n) const {
    if (n < 0) throw std::invalid_argument("tau is defined for n >= 0");
    std::lock_guard<std::mutex> lock(cache_mutex_);
    while (std::int64_t(tau_cache_.size()) <= n) {
        const std::int64_t next = std::int64_t(tau_cache_.size());
        tau_cache_.push_back(tau_cache_.back() + double(sigma(next)));
    }
    return tau_cache_[std::size_t(n)];
}

double Schedule::delta(std::int64_t n) const {
    if (n < 0) throw std::invalid_argument("delta is defined for n >= 0");
    const double s = double(sigma(n + 1));
    return s / (tau(n) + 2.0 * s);
}

std::string Schedule::describe() const {
    std::ostringstream os;
    switch (family_) {
        case ScheduleFamily::constant:
            os << "constant(" << constant_ << ")";
            break;
        case ScheduleFamily::polynomial:
            os << "polynomial(" << degree_ << ")";
            break;
        case ScheduleFamily::explicit_list:
            os << "explicit[" << values_.size() << " values, "
               << (on_exhaust_ == OnExhaust::cycle ? "cycle" : "error") << "]";
            break;
    }
    return os.str();
}

const char* to_string(ConditionReport::Verdict v) {
    switch (v) {
        case ConditionReport::Verdict::diverges: return "diverges";
        case ConditionReport::Verdict::converges: return "converges";
        case ConditionReport::Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

ConditionReport check_conditions(const Schedule& s, std::int64_t horizon) {
    using Verdict = ConditionReport::Verdict;
    if (horizon < 100) throw std::invalid_argument("check_conditions requires horizon >= 100");

    std::int64_t m = horizon;
    if (s.family() == ScheduleFamily::explicit_list && s.on_exhaust() == OnExhaust::error) {
        m = std::min<std::int64_t>(m, std::int64_t(s.values().size()));
    }

    ConditionReport rep;
    rep.horizon = m;

    // partial sums, with dyadic window boundaries at m/4 and m/2
    const std::int64_t q1 = m / 4, q2 = m / 2;
    double s1 = 0.0, s2 = 0.0;
    double s1_q1 = 0.0, s1_q2 = 0.0, s2_q1 = 0.0, s2_q2 = 0.0;
    double tail_sum = 0.0;
    std::int64_t tail_count = 0;
    double tau = s.tau(0);
    for (std::int64_t n = 1; n <= m; ++n) {
        const double sig = double(s.sigma(n));
        tau += sig;
        const double r = sig / tau;
        s1 += r;
        s2 += r * r;
        if (n == q1) { s1_q1 = s1; s2_q1 = s2; }
        if (n == q2) { s1_q2 = s1; s2_q2 = s2; }
        if (n > q2) { tail_sum += r; ++tail_count; }
    }
    rep.partial_sum_i = s1;
    rep.partial_sum_ii = s2;
    rep.ratio_tail = tail_count > 0 ? tail_sum / double(tail_count) : 0.0;

    if (s.family() == ScheduleFamily::constant || s.family() == ScheduleFamily::polynomial) {
        // sigma_n ~ n^p gives tau_n ~ n^{p+1}/(p+1), so sigma_n/tau_n ~ (p+1)/n:
        // the harmonic sum diverges and the squared sum converges.
        rep.analytic = true;
        rep.cond_i = Verdict::diverges;
        rep.cond_ii = Verdict::converges;
        return rep;
    }

    // Growth heuristic over dyadic windows: compare the mass accumulated on
    // (m/2, m] against the mass on (m/4, m/2]. Harmonic-like tails keep the
    // ratio near 1, convergent tails shrink it, non-vanishing terms grow it.
    rep.analytic = false;
    const double a1 = s1_q2 - s1_q1, b1 = s1 - s1_q2;
    const double a2 = s2_q2 - s2_q1, b2 = s2 - s2_q2;
    const double r1 = a1 > 0.0 ? b1 / a1 : 0.0;
    const double r2 = a2 > 0.0 ? b2 / a2 : 0.0;
    rep.cond_i = r1 >= 0.8 ? Verdict::diverges
               : r1 <= 0.6 ? Verdict::converges
                           : Verdict::inconclusive;
    rep.cond_ii = r2 >= 0.8 ? Verdict::diverges
                : r2 <= 0.6 ? Verdict::converges
                            : Verdict::inconclusive;
    return rep;
}

}  // namespace polya
