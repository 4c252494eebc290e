#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace psmkt {

/// Seeded generator with platform-stable draw algorithms. std distributions
/// are implementation-defined, so uniform/Poisson/Pareto sampling is done by
/// hand to keep runs bit-reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : gen_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform in (0, 1], safe as a log argument.
    double uniform_pos() { return 1.0 - uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Exact Poisson sampling by counting unit-exponential arrivals.
    /// Cost is O(mean), fine for the per-step entry means used here.
    long poisson(double mean) {
        if (!(mean > 0.0)) return 0;
        long k = -1;
        double acc = 0.0;
        while (acc < mean) {
            acc += -std::log(uniform_pos());
            ++k;
        }
        return k;
    }

    /// Pareto draw with CCDF (x/x_min)^-a truncated to [x_min, x_max].
    double truncated_pareto(double a, double x_min, double x_max) {
        const double tail = std::pow(x_max / x_min, -a);
        const double u = uniform();
        return x_min * std::pow(1.0 - u * (1.0 - tail), -1.0 / a);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 gen_;
};

} // namespace psmkt
