#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ioncavity/constants.hpp"
#include "ioncavity/coupling.hpp"
#include "ioncavity/errors.hpp"
#include "ioncavity/fit.hpp"
#include "ioncavity/scan.hpp"

using namespace ioncavity;

namespace {

double khz(double freq_khz) { return constants::two_pi * freq_khz * 1e3; }

ScanTrace synthetic_trace(double baseline, double contrast, double period,
                          double phase, int points = 96, double span = 2.0e-6) {
    ScanTrace trace;
    trace.bin_time = 0.1;
    trace.mean_rate = baseline / trace.bin_time;
    trace.rng_seed = 0;
    const double step = span / (points - 1);
    for (int i = 0; i < points; ++i) {
        const double x = step * i;
        const double level =
            baseline * (1.0 + contrast * std::cos(constants::two_pi * x / period + phase));
        trace.displacements.push_back(x);
        trace.counts.push_back(std::llround(std::max(level, 0.0)));
    }
    return trace;
}

} // namespace

TEST_CASE("a noise-free sinusoid is recovered to rounding precision") {
    const double baseline = 1.0e10;
    const double contrast = 0.37;
    const double period = 433.0e-9;
    const double phase = 0.8;
    const ScanTrace trace = synthetic_trace(baseline, contrast, period, phase);
    const ScanFit fit = fit_scan(trace);
    CHECK(fit.offset == doctest::Approx(baseline).epsilon(1e-8));
    CHECK(fit.visibility == doctest::Approx(contrast).epsilon(1e-7));
    CHECK(fit.amplitude == doctest::Approx(baseline * contrast).epsilon(1e-7));
    CHECK(fit.phase == doctest::Approx(phase).epsilon(1e-6));
    CHECK(fit.period == doctest::Approx(period).epsilon(1e-8));
    CHECK(fit.residual_rms < 2.0);
    CHECK_FALSE(fit.low_significance);
}

TEST_CASE("fitted contrast is invariant under count rescaling") {
    const ScanTrace bright = synthetic_trace(4.0e9, 0.22, 410.0e-9, -1.1);
    const ScanTrace dim = synthetic_trace(1.0e9, 0.22, 410.0e-9, -1.1);
    const ScanFit a = fit_scan(bright);
    const ScanFit b = fit_scan(dim);
    CHECK(a.visibility == doctest::Approx(b.visibility).epsilon(1e-7));
    CHECK(a.offset == doctest::Approx(4.0 * b.offset).epsilon(1e-7));
}

TEST_CASE("a flat trace fits as zero contrast and is flagged") {
    ScanTrace trace;
    trace.bin_time = 0.1;
    trace.mean_rate = 2.0e3;
    trace.rng_seed = 0;
    for (int i = 0; i < 64; ++i) {
        trace.displacements.push_back(i * 2.0e-6 / 63);
        trace.counts.push_back(200);
    }
    const ScanFit fit = fit_scan(trace);
    CHECK(fit.offset == doctest::Approx(200.0).epsilon(1e-12));
    CHECK(fit.amplitude == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(fit.visibility == doctest::Approx(0.0).scale(1.0).epsilon(1e-11));
    CHECK(fit.residual_rms == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(fit.low_significance);
}

TEST_CASE("a simulated fringe scan recovers the model contrast") {
    TrapConfig config;
    config.num_ions = 1;
    const double temperature = 1.2 * config.doppler_temperature;
    const CouplingModel model = make_model(config, khz(620.0), temperature);
    const double expected = visibility(model);

    ScanSettings settings;
    settings.mean_rate = 1.0e6;
    settings.bin_time = 0.1;
    settings.seed = 99;
    const ScanTrace trace = simulate_scan(model, settings);
    const ScanFit fit = fit_scan(trace);

    // Shot-noise limit for 64 bins of 1e5 counts is about 5.6e-4 on the
    // contrast, so a five-sigma window is a few parts in a thousand.
    CHECK(std::abs(fit.visibility - expected) < 5.0e-3);
    CHECK(fit.visibility_uncertainty > 1.0e-4);
    CHECK(fit.visibility_uncertainty < 2.0e-3);
    const double half_wave = constants::pi / model.config.wavenumber();
    CHECK(fit.period == doctest::Approx(half_wave).epsilon(0.01));
    CHECK_FALSE(fit.low_significance);
}

TEST_CASE("a hot washed-out scan reports contrast consistent with zero") {
    TrapConfig config;
    config.num_ions = 1;
    const double temperature = 400.0 * config.doppler_temperature;
    const CouplingModel model = make_model(config, khz(454.0), temperature);
    CHECK(visibility(model) < 1e-6);

    ScanSettings settings;
    settings.mean_rate = 2.0e3;
    settings.bin_time = 0.1;
    settings.seed = 4;
    const ScanFit fit = fit_scan(simulate_scan(model, settings));
    CHECK(fit.visibility < 0.08);
    CHECK(fit.visibility < 4.0 * fit.visibility_uncertainty);
}

TEST_CASE("scan fitting validates its input") {
    ScanTrace trace;
    trace.bin_time = 0.1;
    trace.mean_rate = 1e3;
    trace.rng_seed = 0;
    for (int i = 0; i < 6; ++i) {
        trace.displacements.push_back(i * 1e-7);
        trace.counts.push_back(100);
    }
    CHECK_THROWS_AS(fit_scan(trace), std::invalid_argument);

    trace = synthetic_trace(1e4, 0.3, 433e-9, 0.0);
    std::swap(trace.displacements[3], trace.displacements[4]);
    CHECK_THROWS_AS(fit_scan(trace), std::invalid_argument);
}

TEST_CASE("an over-modulated trace is rejected rather than reported") {
    // A modulation depth far beyond 1 clips at zero counts and leaves an
    // apparent contrast no physical fringe can produce.
    const ScanTrace trace = synthetic_trace(1.0e3, 6.0, 433.0e-9, 0.4);
    CHECK_THROWS_AS(fit_scan(trace), FitError);
}

TEST_CASE("a noiseless dataset pins temperature and frequency offset") {
    TrapConfig config;
    config.num_ions = 2;
    const double truth = 1.3 * config.doppler_temperature;
    std::vector<double> grid;
    for (double f = 430.0; f <= 470.0; f += 2.0) {
        grid.push_back(khz(f));
    }
    const SimulatedCurve data =
        simulate_visibility_dataset(config, truth, 0.0, grid, 0.0, 1);
    const CurveFit fit =
        fit_visibility_curve(data.points, config, 1.5 * config.doppler_temperature);
    CHECK(fit.temperature == doctest::Approx(truth).epsilon(1e-4));
    CHECK(std::abs(fit.frequency_offset) < khz(0.005));
    CHECK(fit.chi_squared < 1e-8);
    CHECK(fit.dof == static_cast<int>(grid.size()) - 2);
}

TEST_CASE("an injected frequency miscalibration is recovered") {
    TrapConfig config;
    config.num_ions = 3;
    const double truth = 1.7 * config.doppler_temperature;
    const double offset = khz(1.3);
    std::vector<double> grid;
    for (double f = 400.0; f <= 620.0; f += 5.0) {
        grid.push_back(khz(f));
    }
    const SimulatedCurve data =
        simulate_visibility_dataset(config, truth, offset, grid, 0.02, 12345);
    const CurveFit fit =
        fit_visibility_curve(data.points, config, 1.5 * config.doppler_temperature);

    const double sigma_t = std::sqrt(fit.covariance[0][0]);
    const double sigma_o = std::sqrt(fit.covariance[1][1]);
    REQUIRE(sigma_t > 0.0);
    REQUIRE(sigma_o > 0.0);
    CHECK(std::abs(fit.temperature - truth) < 4.0 * sigma_t);
    CHECK(std::abs(fit.frequency_offset - offset) < 4.0 * sigma_o);

    // Covariance must be symmetric and positive definite.
    CHECK(fit.covariance[0][1] == doctest::Approx(fit.covariance[1][0]).epsilon(1e-9));
    CHECK(fit.covariance[0][0] * fit.covariance[1][1] -
              fit.covariance[0][1] * fit.covariance[1][0] >
          0.0);

    // The reported objective matches a direct weighted sum of residuals.
    double direct = 0.0;
    for (const VisibilityPoint& point : data.points) {
        const CouplingModel model = make_model(
            config, point.com_frequency + fit.frequency_offset, fit.temperature);
        const double r = (visibility(model) - point.visibility) / point.uncertainty;
        direct += r * r;
    }
    CHECK(fit.chi_squared == doctest::Approx(direct).epsilon(1e-6));
    CHECK(fit.dof == static_cast<int>(grid.size()) - 2);
}

TEST_CASE("curve fitting validates its input") {
    TrapConfig config;
    config.num_ions = 1;
    VisibilityCurve tiny;
    tiny.push_back({khz(440.0), 0.3, 0.02});
    tiny.push_back({khz(450.0), 0.28, 0.02});
    CHECK_THROWS_AS(fit_visibility_curve(tiny, config, 1.5 * config.doppler_temperature),
                    FitError);

    std::vector<double> grid = {khz(440.0), khz(450.0), khz(460.0), khz(470.0)};
    const SimulatedCurve data = simulate_visibility_dataset(
        config, 1.5 * config.doppler_temperature, 0.0, grid, 0.0, 1);
    CHECK_THROWS_AS(fit_visibility_curve(data.points, config, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(fit_visibility_curve(data.points, config, -1.0),
                    std::invalid_argument);
}
