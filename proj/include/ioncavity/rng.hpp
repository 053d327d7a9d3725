#pragma once

#include <cmath>
#include <cstdint>

namespace ioncavity {

// SplitMix64 stream (Steele, Lea & Flood, "Fast splittable pseudorandom
// number generators", OOPSLA 2014). Chosen over std::mt19937 because the
// algorithm is a one-page bijective hash of a counter: trivially seedable,
// splittable into independent substreams, and identical on every platform.
// The distribution samplers below are hand-rolled for the same reason --
// the standard library leaves <random> distributions implementation-defined.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    // Independent substream for element `index` of a simulation seeded with
    // `seed`; lets grid points be generated in any order or in parallel.
    static SplitMix64 substream(uint64_t seed, uint64_t index);

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1]; safe as a log argument.
    double uniform_open() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller (cosine branch only, so one draw
    // consumes exactly two uniforms).
    double normal();

    // Poisson draw: CDF inversion for small means, Hormann's PTRD
    // transformed-rejection method ("The transformed rejection method for
    // generating Poisson random variables", 1993) above mean 30.
    long long poisson(double mean);

private:
    uint64_t state_;
};

} // namespace ioncavity
