#pragma once

#include <map>
#include <optional>
#include <string>

#include "ioncavity/constants.hpp"

namespace ioncavity {

// Trap and cavity parameters for one ion species. All values SI; frequencies
// are angular (rad/s) everywhere inside the library. Conversion to ordinary
// Hz/kHz happens only at CLI and file boundaries.
//
// Defaults describe a string of 40Ca+ ions on the 866 nm P1/2-D3/2 cavity
// transition: g0 = 2pi x 0.9 MHz, Doppler temperature 535 uK.
struct TrapConfig {
    double ion_mass = 40.0 * constants::atomic_mass_unit; // kg
    double charge = constants::elementary_charge;         // C
    double wavelength = 866e-9;                           // m
    double g0 = constants::two_pi * 0.9e6;                // rad/s
    int num_ions = 1;
    double doppler_temperature = 535e-6;                  // K

    // Metadata carried along for reporting; no computation consumes these.
    // decay_rate is the linewidth of the upper level, detuning the pump
    // detuning, radial_frequency the radial secular frequency used by the
    // linear-chain stability heuristic.
    double decay_rate = constants::two_pi * 22.3e6;    // rad/s
    double detuning = 0.0;                             // rad/s
    double cavity_finesse = 60000.0;
    double cavity_linewidth = constants::two_pi * 470e3; // rad/s
    double radial_frequency = constants::two_pi * 1.23e6; // rad/s

    // Wavenumber of the cavity standing wave, always derived from the
    // wavelength so that k * lambda = 2pi holds exactly.
    double wavenumber() const { return constants::two_pi / wavelength; }
};

// Builds a TrapConfig for an ion of the given mass with any subset of fields
// overridden. Recognised override keys (SI values, angular frequencies):
//   wavelength, g0, num_ions, doppler_temperature, charge,
//   decay_rate, detuning, cavity_finesse, cavity_linewidth, radial_frequency
// Throws ConfigError on an unknown key or a non-positive value.
TrapConfig make_config(double mass_amu,
                       const std::map<std::string, double>& overrides = {});

// Validates field positivity and num_ions >= 1. Throws ConfigError.
void validate(const TrapConfig& config);

// Run-level parameters that may accompany a TrapConfig in a configuration
// file: a motional temperature and a secular-frequency scan range.
struct RunSettings {
    std::optional<double> temperature;    // K
    std::optional<double> freq_min;       // rad/s (COM secular)
    std::optional<double> freq_max;       // rad/s
};

struct FileConfig {
    TrapConfig trap;
    RunSettings run;
};

// Configuration files are plain "key = value" text, one pair per line,
// '#' starts a comment. Recognised keys:
//   mass_amu, wavelength_nm, g0_2pi_mhz, num_ions, temperature_uk,
//   doppler_temperature_uk, secular_freq_khz_min, secular_freq_khz_max
// Unknown keys are rejected so that typos cannot silently fall back to
// defaults. Values round-trip through save/load to full double precision.
FileConfig load_config_file(const std::string& path);
FileConfig parse_config_text(const std::string& text);
void save_config_file(const std::string& path, const TrapConfig& trap,
                      const RunSettings& run = {});
std::string config_to_text(const TrapConfig& trap, const RunSettings& run = {});

} // namespace ioncavity
