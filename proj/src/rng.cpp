#include "gridsched/rng.hpp"

#include <cmath>
#include <limits>

namespace gridsched {

double Rng::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
    // Rejection keeps the draw exactly uniform.
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - (max % n + 1) % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x > limit);
    return x % n;
}

double Rng::normal(double mean, double sigma) {
    // Marsaglia polar method, one value per call.
    double u, v, s;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    return mean + sigma * u * std::sqrt(-2.0 * std::log(s) / s);
}

std::uint64_t Rng::poisson(double rate) {
    // Knuth's product method, with the rate consumed in chunks so exp(-rate)
    // never underflows for large rates.
    constexpr double step = 500.0;
    double remaining = rate;
    double p = 1.0;
    std::uint64_t k = 0;
    do {
        ++k;
        p *= uniform01_open_low();
        while (p < 1.0 && remaining > 0.0) {
            if (remaining > step) {
                p *= std::exp(step);
                remaining -= step;
            } else {
                p *= std::exp(remaining);
                remaining = 0.0;
            }
        }
    } while (p > 1.0);
    return k - 1;
}

std::uint64_t Rng::geometric(double p) {
    if (p >= 1.0) {
        return 0;
    }
    const double draws = std::floor(std::log(uniform01_open_low()) / std::log1p(-p));
    if (draws >= static_cast<double>(std::numeric_limits<std::uint64_t>::max())) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(draws);
}

double Rng::laplace(double location, double scale) {
    double u;
    do {
        u = uniform01() - 0.5;
    } while (u == -0.5);
    const double magnitude = -scale * std::log1p(-2.0 * std::fabs(u));
    return u < 0.0 ? location - magnitude : location + magnitude;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace gridsched
