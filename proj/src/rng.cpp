#include "ioncavity/rng.hpp"

#include <stdexcept>

namespace ioncavity {

namespace {

// Finalizer from MurmurHash3 by Austin Appleby: full-avalanche mixing of a
// 64-bit word, used to decorrelate (seed, index) pairs before seeding.
uint64_t mix(uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdull;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ull;
    x ^= x >> 33;
    return x;
}

} // namespace

SplitMix64 SplitMix64::substream(uint64_t seed, uint64_t index) {
    return SplitMix64(mix(seed ^ mix(index + 0x716f6e76656e6f69ull)));
}

double SplitMix64::normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    return radius * std::cos(6.283185307179586476925286766559 * u2);
}

long long SplitMix64::poisson(double mean) {
    if (!(mean >= 0.0)) {
        throw std::invalid_argument("poisson mean must be non-negative");
    }
    if (mean == 0.0) {
        return 0;
    }
    if (mean < 30.0) {
        // Sequential CDF inversion; at most a few hundred iterations here.
        const double target = uniform();
        double term = std::exp(-mean);
        double cumulative = term;
        long long k = 0;
        while (cumulative < target && k < 1000) {
            ++k;
            term *= mean / static_cast<double>(k);
            cumulative += term;
        }
        return k;
    }

    // PTRD (Hormann 1993): rejection from a transformed uniform envelope.
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);

    for (;;) {
        double u = uniform() - 0.5;
        const double v = uniform();
        const double us = 0.5 - std::abs(u);
        const long long k =
            static_cast<long long>(std::floor((2.0 * a / us + b) * u + mean + 0.43));
        if (us >= 0.07 && v <= vr) {
            return k;
        }
        if (k < 0 || (us < 0.013 && v > us)) {
            continue;
        }
        const double kd = static_cast<double>(k);
        const double log_accept = std::log(v * inv_alpha / (a / (us * us) + b));
        const double log_target =
            -mean + kd * log_mean - std::lgamma(kd + 1.0);
        if (log_accept <= log_target) {
            return k;
        }
    }
}

} // namespace ioncavity
