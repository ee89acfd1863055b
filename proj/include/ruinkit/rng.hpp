#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace ruinkit {

/// 64-bit avalanche mix (the splitmix64 finalizer, Steele/Lea/Flood).
/// Used to expand seeds and to derive per-replication substreams.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic pseudo-random stream: xoshiro256++ (Blackman & Vigna),
/// seeded through a splitmix64 expansion so any 64-bit value is a valid seed.
///
/// Substreams: `Rng::substream(master, i)` mixes the replication index into
/// the master seed with mix64 before expansion, so replication i draws the
/// same values whether replications run serially or on any number of
/// threads.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        // splitmix64 sequence; cannot produce the all-zero state
        std::uint64_t x = seed;
        for (auto& word : state_) {
            x += 0x9e3779b97f4a7c15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            word = z ^ (z >> 31);
        }
    }

    static Rng substream(std::uint64_t master_seed, std::uint64_t index) {
        return Rng(mix64(master_seed ^ mix64(index + 1)));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Normal(mean, sd) via Box-Muller; consumes exactly two uniforms per
    /// draw (no caching, so consumption is position-independent).
    double normal(double mean, double sd) {
        const double u1 = 1.0 - uniform01();  // (0, 1], log stays finite
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.283185307179586476925286766559;
        return mean + sd * (radius * std::cos(two_pi * u2));
    }

    /// Exponential with mean `theta` by inversion: -theta * ln(1 - U).
    double exponential(double theta) {
        return -theta * std::log1p(-uniform01());
    }

    /// Poisson(mean). Knuth's product-of-uniforms method below mean 10,
    /// Hormann's PTRD transformed rejection above; exact for means well
    /// past 1e6 (counts returned as 64-bit).
    std::int64_t poisson(double mean) {
        if (!(mean >= 0.0)) {
            throw std::invalid_argument("poisson: mean must be >= 0");
        }
        if (mean == 0.0) {
            return 0;
        }
        return mean < 10.0 ? poisson_knuth(mean) : poisson_ptrd(mean);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::int64_t poisson_knuth(double mean) {
        const double limit = std::exp(-mean);
        std::int64_t count = -1;
        double prod = 1.0;
        do {
            prod *= uniform01();
            ++count;
        } while (prod > limit);
        return count;
    }

    // Transformed rejection with decomposition (Hormann 1993), valid for
    // mean >= 10. Dominating distribution G(u) = (2a/(0.5-|u|) + b)u + mean
    // + 0.43 on u in [-0.5, 0.5]; constants per the published algorithm.
    std::int64_t poisson_ptrd(double mean) {
        const double log_mean = std::log(mean);
        const double b = 0.931 + 2.53 * std::sqrt(mean);
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);

        for (;;) {
            const double u = uniform01() - 0.5;
            const double v = uniform01();
            const double us = 0.5 - std::abs(u);
            const double kd = std::floor((2.0 * a / us + b) * u + mean + 0.43);
            if (us >= 0.07 && v <= v_r) {
                return static_cast<std::int64_t>(kd);
            }
            if (kd < 0.0 || (us < 0.013 && v > us)) {
                continue;
            }
            const double k = kd;
            const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
            const double rhs = k * log_mean - mean - std::lgamma(k + 1.0);
            if (lhs <= rhs) {
                return static_cast<std::int64_t>(kd);
            }
        }
    }

    std::array<std::uint64_t, 4> state_;
};

}  // namespace ruinkit
