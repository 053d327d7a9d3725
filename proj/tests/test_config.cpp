#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ioncavity/config.hpp"
#include "ioncavity/constants.hpp"
#include "ioncavity/errors.hpp"

using namespace ioncavity;

TEST_CASE("default configuration describes a calcium string on the 866 nm line") {
    const TrapConfig config;
    CHECK(config.ion_mass == doctest::Approx(40.0 * constants::atomic_mass_unit));
    CHECK(config.wavelength == doctest::Approx(866e-9));
    CHECK(config.g0 == doctest::Approx(constants::two_pi * 0.9e6));
    CHECK(config.doppler_temperature == doctest::Approx(535e-6));
    CHECK(config.num_ions == 1);
    CHECK(config.wavenumber() * config.wavelength == doctest::Approx(constants::two_pi));
}

TEST_CASE("make_config applies overrides and rejects unknown keys") {
    const TrapConfig config = make_config(137.9, {{"wavelength", 1.0e-6},
                                                  {"num_ions", 4.0}});
    CHECK(config.ion_mass ==
          doctest::Approx(137.9 * constants::atomic_mass_unit));
    CHECK(config.wavelength == doctest::Approx(1.0e-6));
    CHECK(config.num_ions == 4);
    CHECK_THROWS_AS(make_config(40.0, {{"wavelngth", 1e-6}}), ConfigError);
    CHECK_THROWS_AS(make_config(-40.0), ConfigError);
    CHECK_THROWS_AS(make_config(40.0, {{"num_ions", 2.5}}), ConfigError);
}

TEST_CASE("validation rejects non-physical parameters") {
    TrapConfig config;
    config.num_ions = 0;
    CHECK_THROWS_AS(validate(config), ConfigError);
    config.num_ions = 1;
    config.wavelength = -866e-9;
    CHECK_THROWS_AS(validate(config), ConfigError);
    config.wavelength = 866e-9;
    CHECK_NOTHROW(validate(config));
}

TEST_CASE("configuration text parses every documented key") {
    const std::string text =
        "# trap\n"
        "mass_amu = 40\n"
        "wavelength_nm = 866\n"
        "g0_2pi_mhz = 0.9\n"
        "num_ions = 3\n"
        "\n"
        "temperature_uk = 802.5\n"
        "doppler_temperature_uk = 535\n"
        "secular_freq_khz_min = 400\n"
        "secular_freq_khz_max = 620\n";
    const FileConfig parsed = parse_config_text(text);
    CHECK(parsed.trap.ion_mass == doctest::Approx(40.0 * constants::atomic_mass_unit));
    CHECK(parsed.trap.wavelength == doctest::Approx(866e-9));
    CHECK(parsed.trap.g0 == doctest::Approx(constants::two_pi * 0.9e6));
    CHECK(parsed.trap.num_ions == 3);
    CHECK(parsed.trap.doppler_temperature == doctest::Approx(535e-6));
    REQUIRE(parsed.run.temperature.has_value());
    CHECK(*parsed.run.temperature == doctest::Approx(802.5e-6));
    REQUIRE(parsed.run.freq_min.has_value());
    CHECK(*parsed.run.freq_min == doctest::Approx(constants::two_pi * 400e3));
    CHECK(*parsed.run.freq_max == doctest::Approx(constants::two_pi * 620e3));
}

TEST_CASE("unknown configuration keys are named in the error") {
    try {
        parse_config_text("mass_amu = 40\nwavelenght_nm = 866\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& error) {
        CHECK(std::string(error.what()).find("wavelenght_nm") != std::string::npos);
    }
}

TEST_CASE("malformed and inconsistent files are rejected") {
    CHECK_THROWS_AS(parse_config_text("mass_amu 40\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("mass_amu = forty\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("num_ions = 2.5\n"), ConfigError);
    CHECK_THROWS_AS(
        parse_config_text("secular_freq_khz_min = 620\nsecular_freq_khz_max = 400\n"),
        ConfigError);
}

TEST_CASE("configuration values survive a save/load round trip exactly") {
    TrapConfig trap = make_config(39.9626, {{"wavelength", 8.6612345e-7},
                                            {"g0", 5.654866776461628e6},
                                            {"num_ions", 5.0}});
    RunSettings run;
    run.temperature = 7.77123456789e-4;
    run.freq_min = constants::two_pi * 412.3456e3;
    run.freq_max = constants::two_pi * 619.8765e3;

    // Unit conversion on either side of the file costs at most an ulp.
    const FileConfig reloaded = parse_config_text(config_to_text(trap, run));
    CHECK(reloaded.trap.ion_mass ==
          doctest::Approx(trap.ion_mass).epsilon(1e-15));
    CHECK(reloaded.trap.wavelength ==
          doctest::Approx(trap.wavelength).epsilon(1e-15));
    CHECK(reloaded.trap.g0 == doctest::Approx(trap.g0).epsilon(1e-15));
    CHECK(reloaded.trap.num_ions == trap.num_ions);
    CHECK(*reloaded.run.temperature ==
          doctest::Approx(*run.temperature).epsilon(1e-15));
    CHECK(*reloaded.run.freq_min ==
          doctest::Approx(*run.freq_min).epsilon(1e-15));
    CHECK(*reloaded.run.freq_max ==
          doctest::Approx(*run.freq_max).epsilon(1e-15));
}

TEST_CASE("file loading reports missing files") {
    CHECK_THROWS_AS(load_config_file("/nonexistent/ioncavity.cfg"), ConfigError);

    const std::string path = "test_config_roundtrip.cfg";
    save_config_file(path, TrapConfig{});
    const FileConfig loaded = load_config_file(path);
    CHECK(loaded.trap.num_ions == 1);
    std::remove(path.c_str());
}
