#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace holobf {

// splitmix64 step (Steele/Lea/Flood mixing constants). Used for all seed
// derivation so that derived streams are stable across compilers and
// releases; the raw engine below is the standard-specified mt19937_64.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Deterministic random stream. All mappings from raw 64-bit draws to doubles
// are implemented here instead of <random> distributions, which are
// implementation-defined; this keeps every draw bit-reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller pair; consumes exactly two raw draws.
    std::pair<double, double> normal_pair() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        const double t = 6.283185307179586476925286766559 * u2;
        return {r * std::cos(t), r * std::sin(t)};
    }

    double normal() { return normal_pair().first; }

    // Circularly-symmetric complex Gaussian with E|z|^2 = 1.
    std::complex<double> complex_normal() {
        const auto [a, b] = normal_pair();
        return {a * 0.7071067811865475244, b * 0.7071067811865475244};
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace holobf
