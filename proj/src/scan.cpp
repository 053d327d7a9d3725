#include "ioncavity/scan.hpp"

#include <algorithm>
#include <stdexcept>

#include "ioncavity/errors.hpp"
#include "ioncavity/rng.hpp"

namespace ioncavity {

ScanTrace simulate_scan(const CouplingModel& model, const ScanSettings& settings) {
    if (!(settings.span > 0.0)) {
        throw std::invalid_argument("scan span must be positive");
    }
    if (settings.num_points < 8) {
        throw std::invalid_argument("scan needs at least 8 points");
    }
    if (!(settings.bin_time > 0.0) || !(settings.mean_rate > 0.0)) {
        throw std::invalid_argument("bin time and mean rate must be positive");
    }
    if (settings.mean_rate * settings.bin_time < 1.0) {
        throw std::invalid_argument(
            "mean counts per bin below 1; increase bin time or rate");
    }

    const std::size_t n = static_cast<std::size_t>(settings.num_points);
    const double k = model.config.wavenumber();
    const double step = settings.span / static_cast<double>(n - 1);

    ScanTrace trace;
    trace.displacements.resize(n);
    trace.counts.resize(n);
    trace.bin_time = settings.bin_time;
    trace.mean_rate = settings.mean_rate;
    trace.rng_seed = settings.seed;

    // Translating the string by x advances every fringe term by 2kx.
    std::vector<double> profile(n);
    double profile_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        trace.displacements[i] = step * static_cast<double>(i);
        profile[i] = emission_at_phase(model, 2.0 * k * trace.displacements[i]);
        profile_mean += profile[i];
    }
    profile_mean /= static_cast<double>(n);
    if (!(profile_mean > 0.0)) {
        throw NumericError("emission profile vanished over the scan span");
    }

    const double counts_per_unit =
        settings.mean_rate * settings.bin_time / profile_mean;
    for (std::size_t i = 0; i < n; ++i) {
        SplitMix64 rng = SplitMix64::substream(settings.seed, i);
        trace.counts[i] = rng.poisson(profile[i] * counts_per_unit);
    }
    return trace;
}

SimulatedCurve simulate_visibility_dataset(const TrapConfig& config,
                                           double temperature,
                                           double frequency_offset,
                                           std::span<const double> frequencies,
                                           double visibility_sigma,
                                           uint64_t seed) {
    if (frequencies.empty()) {
        throw std::invalid_argument("frequency grid is empty");
    }
    if (!(visibility_sigma >= 0.0)) {
        throw std::invalid_argument("visibility noise must be non-negative");
    }

    SimulatedCurve curve;
    curve.true_temperature = temperature;
    curve.true_frequency_offset = frequency_offset;
    curve.points.resize(frequencies.size());
    for (std::size_t i = 0; i < frequencies.size(); ++i) {
        const double shifted = frequencies[i] + frequency_offset;
        if (!(shifted > 0.0)) {
            throw std::invalid_argument(
                "frequency offset pushes a grid point below zero");
        }
        const CouplingModel model = make_model(config, shifted, temperature);
        double value = visibility(model);
        if (visibility_sigma > 0.0) {
            SplitMix64 rng = SplitMix64::substream(seed, i);
            value += visibility_sigma * rng.normal();
        }
        curve.points[i].com_frequency = frequencies[i];
        curve.points[i].visibility = std::clamp(value, 0.0, 1.0);
        curve.points[i].uncertainty = visibility_sigma;
    }
    return curve;
}

} // namespace ioncavity
