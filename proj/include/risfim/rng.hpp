#pragma once

// Seedable random number generation with a fully documented draw discipline.
//
// All stochastic parts of the library (channel generation, Gaussian
// randomization, Monte Carlo noise) pull from this engine so that a run is
// reproducible from a single 64-bit seed.  The stream is defined as:
//
//   engine:    std::mt19937_64 seeded directly with the 64-bit seed
//   uniform:   next() >> 11, scaled by 2^-53  ->  double in [0, 1)
//   gaussian:  Box-Muller on two uniform draws (cached second variate)
//
// std::uniform_real_distribution and std::normal_distribution are avoided on
// purpose: their output is implementation-defined, while the mapping above is
// bit-identical across standard libraries.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>

namespace risfim {

/// Derives independent substream seeds from a master seed (splitmix64 mix).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    static constexpr const char* kAlgorithm = "mt19937_64/canonical53/box-muller";

    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::string algorithm() const { return kAlgorithm; }

    /// Uniform double in [0, 1), 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    /// Standard normal via Box-Muller; the second variate is cached.
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        double u2 = uniform();
        // Guard against log(0).
        while (u1 <= 0.0) u1 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * M_PI * u2;
        cached_ = rad * std::sin(ang);
        have_cached_ = true;
        return rad * std::cos(ang);
    }

    /// Circularly symmetric complex normal CN(0, 1):
    /// real and imaginary parts i.i.d. N(0, 1/2).
    std::complex<double> complex_gaussian() {
        const double s = std::sqrt(0.5);
        const double re = s * gaussian();
        const double im = s * gaussian();
        return {re, im};
    }

    /// A fresh Rng for substream `index`, independent of this stream.
    Rng substream(std::uint64_t index) const {
        return Rng(derive_seed(seed_, index));
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace risfim
