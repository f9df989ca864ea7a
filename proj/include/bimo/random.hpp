#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bimo {

// 64-bit finalizer with good avalanche; used to derive independent seeds
// (per point, per frame) from a master seed without correlation.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return mix64(base ^ mix64(index + 0x51ed270b7a2eULL));
}

// Deterministic pseudorandom stream. One instance per thread/frame; the
// engine is fixed by the standard, so sequences are stable across platforms.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    int coin() { return static_cast<int>(eng_() & 1ULL); }

    // Standard normal via the Marsaglia polar method. The spare deviate is
    // deliberately discarded: no hidden state beyond the engine itself.
    double gaussian() {
        for (;;) {
            double u = 2.0 * uniform01() - 1.0;
            double v = 2.0 * uniform01() - 1.0;
            double s = u * u + v * v;
            if (s > 0.0 && s < 1.0)
                return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }

    // Poisson variate. Inversion by sequential search for small means;
    // Hormann's transformed-rejection (PTRS) otherwise.
    long poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean < 30.0) return poisson_inversion(mean);
        return poisson_ptrs(mean);
    }

  private:
    long poisson_inversion(double mean) {
        // k is capped far beyond any mass double precision can represent.
        const long cap = static_cast<long>(mean + 12.0 * std::sqrt(mean) + 60.0);
        double p = std::exp(-mean);
        double cdf = p;
        double u = uniform01();
        long k = 0;
        while (u > cdf && k < cap) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }

    long poisson_ptrs(double mean) {
        const double slam = std::sqrt(mean);
        const double loglam = std::log(mean);
        const double b = 0.931 + 2.53 * slam;
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double vr = 0.9277 - 3.6224 / (b - 2.0);
        for (;;) {
            double u = uniform01() - 0.5;
            double v = uniform01();
            double us = 0.5 - std::abs(u);
            double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
            if (us >= 0.07 && v <= vr) return static_cast<long>(k);
            if (k < 0.0 || (us < 0.013 && v > us)) continue;
            if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
                k * loglam - mean - std::lgamma(k + 1.0))
                return static_cast<long>(k);
        }
    }

    std::mt19937_64 eng_;
};

} // namespace bimo
