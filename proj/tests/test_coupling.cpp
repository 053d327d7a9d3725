#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "ioncavity/constants.hpp"
#include "ioncavity/coupling.hpp"
#include "ioncavity/oracles.hpp"

using namespace ioncavity;

namespace {

TrapConfig config_for(int ions) {
    TrapConfig config;
    config.num_ions = ions;
    return config;
}

double khz(double freq_khz) { return constants::two_pi * freq_khz * 1e3; }

// String pinned at given half-wavelength positions with zero thermal motion.
CouplingModel rigid_model(const std::vector<double>& half_wave_positions) {
    CouplingModel model;
    model.config = config_for(static_cast<int>(half_wave_positions.size()));
    model.solution.num_ions = static_cast<int>(half_wave_positions.size());
    model.solution.com_frequency = khz(444.0);
    model.solution.length_scale = 1.0;
    for (const double h : half_wave_positions) {
        model.solution.positions.push_back(h * 0.5 * model.config.wavelength);
    }
    model.thermal.temperature = 0.0;
    model.thermal.mode_spreads.assign(half_wave_positions.size(), 0.0);
    model.thermal.ion_spreads.assign(half_wave_positions.size(), 0.0);
    return model;
}

} // namespace

TEST_CASE("the standing-wave coupling has antinodes every half wavelength") {
    const TrapConfig config = config_for(1);
    CHECK(coupling_strength(config, 0.0) == doctest::Approx(config.g0));
    CHECK(std::abs(coupling_strength(config, 0.25 * config.wavelength)) <
          1e-6 * config.g0);
    CHECK(coupling_strength(config, 0.5 * config.wavelength) ==
          doctest::Approx(-config.g0).epsilon(1e-9));
}

TEST_CASE("single-ion fringes have contrast equal to the thermal factor") {
    const TrapConfig config = config_for(1);
    const double omega = khz(454.0);
    const CouplingModel model =
        make_model(config, omega, 1.5 * config.doppler_temperature);
    const double k = config.wavenumber();
    const double dz = model.thermal.ion_spreads[0];
    const double expected = std::exp(-k * k * dz * dz);
    CHECK(visibility(model) == doctest::Approx(expected).epsilon(1e-12));

    const double w_max = emission_at_phase(model, -2.0 * k * model.solution.positions[0]);
    CHECK(w_max == doctest::Approx(1.0 + expected).epsilon(1e-12));
}

TEST_CASE("visibility matches the frozen single- and two-ion references") {
    const TrapConfig one = config_for(1);
    CHECK(visibility(make_model(one, khz(454.0), 1.5 * one.doppler_temperature)) ==
          doctest::Approx(0.11552712169264988).epsilon(1e-9));
    CHECK(visibility(make_model(one, khz(620.0), 1.2 * one.doppler_temperature)) ==
          doctest::Approx(0.39621188985112604).epsilon(1e-9));

    const TrapConfig two = config_for(2);
    CHECK(visibility(make_model(two, khz(451.1758197607784),
                                1.5 * two.doppler_temperature)) ==
          doctest::Approx(0.23295668962910454).epsilon(1e-8));
}

TEST_CASE("closed-form visibility agrees with a dense fringe scan") {
    for (int ions = 1; ions <= 6; ++ions) {
        const TrapConfig config = config_for(ions);
        const CouplingModel model = make_model(
            config, khz(400.0 + 37.0 * ions), (0.8 + 0.3 * ions) *
                                                  config.doppler_temperature);
        CAPTURE(ions);
        CHECK(std::abs(visibility(model) -
                       checks::visibility_by_phase_scan(model)) < 1e-9);
    }
}

TEST_CASE("visibility curves are deterministic and match pointwise models") {
    const TrapConfig config = config_for(3);
    const double temperature = 1.56 * config.doppler_temperature;
    std::vector<double> grid;
    for (double f = 430.0; f <= 460.0; f += 1.0) {
        grid.push_back(khz(f));
    }
    const VisibilityCurve a = visibility_curve(config, temperature, grid);
    const VisibilityCurve b = visibility_curve(config, temperature, grid);
    REQUIRE(a.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(a[i].visibility == b[i].visibility);
        const CouplingModel model = make_model(config, grid[i], temperature);
        CHECK(a[i].visibility == doctest::Approx(visibility(model)).epsilon(1e-12));
    }

    std::vector<double> descending = {khz(500.0), khz(400.0)};
    CHECK_THROWS_AS(visibility_curve(config, temperature, descending),
                    std::domain_error);
    CHECK_THROWS_AS(visibility_curve(config, temperature, {}), std::domain_error);
}

TEST_CASE("average coupling of commensurate-offset rigid strings") {
    // Four ions at +-7.45 and +-23.55 half-waves: every ion sits the same
    // distance from a node, so the best placement reaches |sin(0.45 pi)|.
    const CouplingModel four = rigid_model({-23.55, -7.45, 7.45, 23.55});
    const CouplingReport four_report = average_coupling(four);
    const double expected_four = std::cos(0.05 * constants::pi);
    CHECK(four_report.g_tilde == doctest::Approx(expected_four).epsilon(1e-9));
    CHECK(four_report.phase_at_optimum ==
          doctest::Approx(0.5 * constants::pi).epsilon(1e-5));
    for (const double coupling : four_report.per_ion_couplings) {
        CHECK(coupling == doctest::Approx(expected_four).epsilon(1e-9));
    }
    CHECK(four_report.g_tilde_at_emission_peak ==
          doctest::Approx(expected_four).epsilon(1e-9));

    // Five ions at 0, +-15.1, +-32 half-waves: three ions on antinodes, two
    // displaced by a tenth of a fringe.
    const CouplingModel five = rigid_model({-32.0, -15.1, 0.0, 15.1, 32.0});
    const CouplingReport five_report = average_coupling(five);
    const double expected_five = (3.0 + 2.0 * std::cos(0.1 * constants::pi)) / 5.0;
    CHECK(five_report.g_tilde == doctest::Approx(expected_five).epsilon(1e-9));
    CHECK(five_report.g_tilde_at_emission_peak ==
          doctest::Approx(expected_five).epsilon(1e-9));
}

TEST_CASE("a single ion always reaches unit average coupling") {
    const CouplingModel model =
        make_model(config_for(1), khz(500.0), config_for(1).doppler_temperature);
    const CouplingReport report = average_coupling(model);
    CHECK(report.g_tilde == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.per_ion_couplings[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("frequency optimisation finds the two-ion commensurate peak") {
    const TrapConfig two = config_for(2);
    const FrequencyOptimum optimum =
        optimise_frequency(two, 1.5 * two.doppler_temperature, khz(443.0),
                           khz(462.0), Objective::MaxVisibility);
    CHECK(optimum.com_frequency / (constants::two_pi * 1e3) ==
          doctest::Approx(451.79379461036405).epsilon(5e-5));
    CHECK(optimum.value == doctest::Approx(0.233421799552982).epsilon(1e-6));
    REQUIRE(optimum.solution.num_ions == 2);
    const double spacing =
        (optimum.solution.positions[1] - optimum.solution.positions[0]) /
        (0.5 * two.wavelength);
    CHECK(spacing == doctest::Approx(21.979933990382175).epsilon(1e-4));
}

TEST_CASE("flat objectives resolve to the lowest frequency") {
    // One ion: the average coupling is 1 at any frequency.
    const TrapConfig one = config_for(1);
    const FrequencyOptimum optimum =
        optimise_frequency(one, one.doppler_temperature, khz(400.0), khz(500.0),
                           Objective::MaxGTilde, 101);
    CHECK(optimum.com_frequency == doctest::Approx(khz(400.0)).epsilon(1e-12));
    CHECK(optimum.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("optimisation validates its frequency range") {
    const TrapConfig two = config_for(2);
    CHECK_THROWS_AS(optimise_frequency(two, 1e-4, khz(500.0), khz(400.0),
                                       Objective::MaxVisibility),
                    std::domain_error);
    CHECK_THROWS_AS(optimise_frequency(two, 1e-4, -khz(400.0), khz(500.0),
                                       Objective::MaxVisibility),
                    std::domain_error);
}
