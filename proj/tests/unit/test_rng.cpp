#include <doctest.h>

#include <cmath>
#include <vector>

#include "polya/rng.hpp"

using namespace polya;

TEST_CASE("stream derivation: reproducible and replication-separated") {
    auto a1 = RngStream::for_replication(42, 0);
    auto a2 = RngStream::for_replication(42, 0);
    auto b = RngStream::for_replication(42, 1);
    auto c = RngStream::for_replication(43, 0);
    bool identical = true, differs_rep = false, differs_master = false;
    for (int i = 0; i < 64; ++i) {
        const double u1 = a1.uniform(), u2 = a2.uniform();
        identical = identical && (u1 == u2);
        differs_rep = differs_rep || (u1 != b.uniform());
        differs_master = differs_master || (u1 != c.uniform());
    }
    CHECK(identical);
    CHECK(differs_rep);
    CHECK(differs_master);
}

TEST_CASE("binomial: degenerate parameters") {
    RngStream rng(1);
    CHECK(rng.binomial(0, 0.5) == 0);
    CHECK(rng.binomial(100, 0.0) == 0);
    CHECK(rng.binomial(100, 1.0) == 100);
    for (int i = 0; i < 100; ++i) {
        const auto k = rng.binomial(1, 0.3);
        CHECK(k <= 1);
    }
}

TEST_CASE("binomial: mean and variance on the inversion path (n p < 10)") {
    RngStream rng(99);
    const std::uint64_t n = 1000;
    const double p = 0.001;  // n p = 1
    const int samples = 200000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double k = double(rng.binomial(n, p));
        sum += k;
        sumsq += k * k;
    }
    const double mean = sum / samples;
    const double var = sumsq / samples - mean * mean;
    const double se_mean = std::sqrt(n * p * (1 - p) / samples);
    CHECK(std::abs(mean - double(n) * p) < 4.0 * se_mean);
    CHECK(var == doctest::Approx(n * p * (1 - p)).epsilon(0.05));
}

TEST_CASE("binomial: mean and variance on the rejection path (n p >= 10)") {
    RngStream rng(123);
    const std::uint64_t n = 100000;
    const double p = 0.37;
    const int samples = 20000;
    double sum = 0.0, sumsq = 0.0;
    std::uint64_t min_k = n, max_k = 0;
    for (int i = 0; i < samples; ++i) {
        const auto k = rng.binomial(n, p);
        min_k = std::min(min_k, k);
        max_k = std::max(max_k, k);
        sum += double(k);
        sumsq += double(k) * double(k);
    }
    const double mean = sum / samples;
    const double var = sumsq / samples - mean * mean;
    const double npq = double(n) * p * (1 - p);
    CHECK(std::abs(mean - double(n) * p) < 4.0 * std::sqrt(npq / samples));
    CHECK(var == doctest::Approx(npq).epsilon(0.05));
    CHECK(max_k <= n);
    CHECK(min_k >= 0);
}

TEST_CASE("binomial: p > 1/2 flip is unbiased") {
    RngStream rng(7);
    const std::uint64_t n = 50;
    const double p = 0.9;
    const int samples = 100000;
    double sum = 0.0;
    for (int i = 0; i < samples; ++i) sum += double(rng.binomial(n, p));
    const double se = std::sqrt(double(n) * p * (1 - p) / samples);
    CHECK(std::abs(sum / samples - double(n) * p) < 4.0 * se);
}

TEST_CASE("binomial: chi-square goodness of fit against the exact pmf") {
    // exercises the rejection path (n p >= 10) across the whole support
    RngStream rng(20240817);
    const int n = 40;
    const double p = 0.3;
    const int samples = 200000;
    std::vector<double> pmf(n + 1);
    pmf[0] = std::pow(1.0 - p, n);
    for (int k = 0; k < n; ++k) {
        pmf[k + 1] = pmf[k] * double(n - k) / double(k + 1) * p / (1.0 - p);
    }
    std::vector<int> observed(n + 1, 0);
    for (int i = 0; i < samples; ++i) ++observed[rng.binomial(n, p)];

    // merge bins with small expectation into the tails
    double chi2 = 0.0;
    int bins = 0;
    double tail_exp = 0.0;
    int tail_obs = 0;
    for (int k = 0; k <= n; ++k) {
        const double expect = pmf[k] * samples;
        if (expect < 5.0) {
            tail_exp += expect;
            tail_obs += observed[k];
            continue;
        }
        chi2 += (observed[k] - expect) * (observed[k] - expect) / expect;
        ++bins;
    }
    if (tail_exp > 0.0) {
        chi2 += (tail_obs - tail_exp) * (tail_obs - tail_exp) / tail_exp;
        ++bins;
    }
    // ~25 degrees of freedom; 99.9% quantile is about 52.6
    CHECK(bins > 15);
    CHECK(chi2 < 60.0);
}

TEST_CASE("multinomial: counts always sum to n") {
    RngStream rng(5);
    const std::vector<double> probs{0.1, 0.2, 0.3, 0.4};
    std::vector<std::uint64_t> out(4);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::uint64_t n = 1 + (trial % 97);
        rng.multinomial(n, probs, out);
        std::uint64_t total = 0;
        for (auto k : out) total += k;
        CHECK(total == n);
    }
}

TEST_CASE("multinomial: degenerate point mass goes to the unit coordinate") {
    RngStream rng(5);
    const std::vector<double> probs{1.0, 0.0, 0.0};
    std::vector<std::uint64_t> out(3);
    for (int trial = 0; trial < 50; ++trial) {
        rng.multinomial(17, probs, out);
        CHECK(out[0] == 17);
        CHECK(out[1] == 0);
        CHECK(out[2] == 0);
    }
}

TEST_CASE("multinomial: empirical mean matches n * p within 4 standard errors") {
    RngStream rng(31);
    const std::vector<double> probs{0.2, 0.5, 0.3};
    const std::uint64_t n = 6;
    const int samples = 100000;
    std::vector<double> mean(3, 0.0);
    std::vector<std::uint64_t> out(3);
    for (int i = 0; i < samples; ++i) {
        rng.multinomial(n, probs, out);
        for (int j = 0; j < 3; ++j) mean[j] += double(out[j]);
    }
    for (int j = 0; j < 3; ++j) {
        mean[j] /= samples;
        const double expect = double(n) * probs[j];
        const double se = std::sqrt(double(n) * probs[j] * (1 - probs[j]) / samples);
        CHECK(std::abs(mean[j] - expect) < 4.0 * se);
    }
}
