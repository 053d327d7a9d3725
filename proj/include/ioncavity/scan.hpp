#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ioncavity/config.hpp"
#include "ioncavity/coupling.hpp"

namespace ioncavity {

// Parameters of a simulated standing-wave scan: the ion string is translated
// along the cavity axis while cavity emission is counted in fixed time bins.
struct ScanSettings {
    double span = 1.732e-6;   // total translation, m (two wavelengths)
    int num_points = 64;      // bins across the span
    double bin_time = 0.1;    // s per bin
    double mean_rate = 2.0e3; // span-averaged count rate, s^-1
    uint64_t seed = 1;
};

struct ScanTrace {
    std::vector<double> displacements; // m, ascending from zero
    std::vector<long long> counts;
    double bin_time = 0.0;
    double mean_rate = 0.0;
    uint64_t rng_seed = 0;
};

// Draws Poisson counts around the emission profile of `model`. Each grid
// point uses its own RNG substream, so the trace is independent of
// evaluation order.
ScanTrace simulate_scan(const CouplingModel& model, const ScanSettings& settings);

// A synthetic visibility-vs-frequency dataset with known ground truth.
struct SimulatedCurve {
    VisibilityCurve points;           // uncertainty field = visibility_sigma
    double true_temperature = 0.0;    // K
    double true_frequency_offset = 0.0; // rad/s, added to the true axis
};

// Evaluates the model visibility at (frequency + offset), adds Gaussian
// noise of width `visibility_sigma`, and clamps to [0, 1]. `frequencies`
// are angular centre-of-mass frequencies and must be positive.
SimulatedCurve simulate_visibility_dataset(const TrapConfig& config,
                                           double temperature,
                                           double frequency_offset,
                                           std::span<const double> frequencies,
                                           double visibility_sigma,
                                           uint64_t seed);

} // namespace ioncavity
