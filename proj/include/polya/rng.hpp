// Reproducible random streams. Each replication owns a stream derived from
// (master seed, replication index) by a keyed splitmix hash, so results do
// not depend on thread count or scheduling order. The binomial sampler is
// hand-rolled (inversion for small n*p, BTRS transformed rejection above)
// because std::binomial_distribution's sequence is implementation-defined.

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace polya {

std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t replication);

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    static RngStream for_replication(std::uint64_t master_seed, std::uint64_t replication) {
        return RngStream(derive_stream_seed(master_seed, replication));
    }

    std::uint64_t seed() const { return seed_; }

    // uniform on [0,1)
    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

    double exponential() { return -std::log1p(-uniform()); }

    std::uint64_t binomial(std::uint64_t n, double p);

    // conditional-binomial decomposition; probs need not be exactly normalized
    void multinomial(std::uint64_t n, std::span<const double> probs,
                     std::span<std::uint64_t> out);

private:
    double binomial_inversion(double n, double p);
    double binomial_btrs(double n, double p);

    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

}  // namespace polya
