#pragma once

#include <cstdint>
#include <random>

namespace gridsched {

/// Seedable random source used everywhere in the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The standard distribution classes are not (their algorithms are
/// implementation-defined), so all sampling is done here by hand to keep
/// results identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform01();

    /// Uniform on (0, 1].
    double uniform01_open_low() { return 1.0 - uniform01(); }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n);

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal(double mean, double sigma);
    std::uint64_t poisson(double rate);
    /// Number of failures before the first success, support {0, 1, ...}.
    std::uint64_t geometric(double p);
    double laplace(double location, double scale);

private:
    std::mt19937_64 engine_;
};

/// Derives an independent stream seed from a base seed and a stream index
/// (splitmix64 finalizer over the combined value).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

} // namespace gridsched
