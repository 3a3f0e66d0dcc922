#include "polya/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polya {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Stirling series tail of log(k!); exact table for k < 10.
double stirling_tail(double k) {
    static const double table[] = {
        0.0810614667953272, 0.0413406959554092, 0.0276779256849983,
        0.0207906721037650, 0.0166446911898211, 0.0138761288230707,
        0.0118967099458917, 0.0104112652619720, 0.0092554621827127,
        0.0083305634333628};
    if (k < 10.0) return table[int(k)];
    const double kp1sq = (k + 1.0) * (k + 1.0);
    return (1.0 / 12 - (1.0 / 360 - 1.0 / 1260 / kp1sq) / kp1sq) / (k + 1.0);
}

}  // namespace

std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t replication) {
    return mix64(mix64(master_seed + kGamma) ^ (replication * kGamma + 0xD1B54A32D192ED03ULL));
}

// Cumulative-probability inversion; O(n p) expected, used when n p < 10.
double RngStream::binomial_inversion(double n, double p) {
    const double q = 1.0 - p;
    const double s = p / q;
    const double a = (n + 1.0) * s;
    double r = std::pow(q, n);  // n p < 10 keeps this well above underflow
    double u = uniform();
    double x = 0.0;
    while (u > r) {
        u -= r;
        x += 1.0;
        if (x > n) return n;
        r *= a / x - s;
    }
    return x;
}

// Hormann's BTRS transformed-rejection sampler; requires p <= 0.5, n p >= 10.
double RngStream::binomial_btrs(double n, double p) {
    const double spq = std::sqrt(n * p * (1.0 - p));
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = n * p + 0.5;
    const double vr = 0.92 - 4.2 / b;
    const double r = p / (1.0 - p);
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double m = std::floor((n + 1.0) * p);
    for (;;) {
        const double u = uniform() - 0.5;
        double v = uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + c);
        if (us >= 0.07 && v <= vr) return k;
        if (k < 0.0 || k > n) continue;
        v = std::log(v * alpha / (a / (us * us) + b));
        const double bound =
            (m + 0.5) * std::log((m + 1.0) / (r * (n - m + 1.0))) +
            (n + 1.0) * std::log((n - m + 1.0) / (n - k + 1.0)) +
            (k + 0.5) * std::log(r * (n - k + 1.0) / (k + 1.0)) +
            stirling_tail(m) + stirling_tail(n - m) - stirling_tail(k) - stirling_tail(n - k);
        if (v <= bound) return k;
    }
}

std::uint64_t RngStream::binomial(std::uint64_t n, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        if (std::isnan(p)) throw std::invalid_argument("binomial probability is NaN");
        p = p < 0.0 ? 0.0 : 1.0;
    }
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    if (n == 1) return uniform() < p ? 1 : 0;
    const bool flip = p > 0.5;
    const double q = flip ? 1.0 - p : p;
    const double nd = double(n);
    const double k = nd * q < 10.0 ? binomial_inversion(nd, q) : binomial_btrs(nd, q);
    const auto ki = std::uint64_t(k);
    return flip ? n - ki : ki;
}

void RngStream::multinomial(std::uint64_t n, std::span<const double> probs,
                            std::span<std::uint64_t> out) {
    if (probs.size() != out.size() || probs.empty()) {
        throw std::invalid_argument("multinomial: probs/out size mismatch");
    }
    const std::size_t d = probs.size();
    double remaining_p = 0.0;
    std::size_t remainder_color = d - 1;  // last color with positive probability
    for (std::size_t i = 0; i < d; ++i) {
        remaining_p += probs[i];
        if (probs[i] > 0.0) remainder_color = i;
    }
    std::uint64_t remaining = n;
    for (std::size_t i = 0; i < d; ++i) {
        if (i == remainder_color) continue;
        if (remaining == 0 || remaining_p <= 0.0 || probs[i] <= 0.0) {
            out[i] = 0;
            continue;
        }
        const double pi = std::min(1.0, std::max(0.0, probs[i] / remaining_p));
        out[i] = binomial(remaining, pi);
        remaining -= out[i];
        remaining_p -= probs[i];
    }
    out[remainder_color] = remaining;
}

}  // namespace polya
