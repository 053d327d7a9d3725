#include "ioncavity/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ioncavity/errors.hpp"

namespace ioncavity {

namespace {

void require_positive(const char* name, double value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw ConfigError(std::string(name) + " must be strictly positive, got " +
                          std::to_string(value));
    }
}

// Full round-trip precision for the file format.
std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    try {
        size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("malformed value for key '" + key + "': '" + text + "'");
    }
}

int to_ion_count(const char* name, double value) {
    const double rounded = std::round(value);
    if (!(value > 0.0) || std::abs(value - rounded) > 1e-9 || rounded < 1.0) {
        throw ConfigError(std::string(name) + " must be a positive integer, got " +
                          std::to_string(value));
    }
    return static_cast<int>(rounded);
}

} // namespace

void validate(const TrapConfig& config) {
    require_positive("ion_mass", config.ion_mass);
    require_positive("charge", config.charge);
    require_positive("wavelength", config.wavelength);
    require_positive("g0", config.g0);
    require_positive("doppler_temperature", config.doppler_temperature);
    if (config.num_ions < 1) {
        throw ConfigError("num_ions must be >= 1, got " +
                          std::to_string(config.num_ions));
    }
}

TrapConfig make_config(double mass_amu,
                       const std::map<std::string, double>& overrides) {
    require_positive("mass_amu", mass_amu);
    TrapConfig config;
    config.ion_mass = mass_amu * constants::atomic_mass_unit;
    for (const auto& [key, value] : overrides) {
        if (key == "wavelength") {
            config.wavelength = value;
        } else if (key == "g0") {
            config.g0 = value;
        } else if (key == "num_ions") {
            config.num_ions = to_ion_count("num_ions", value);
        } else if (key == "doppler_temperature") {
            config.doppler_temperature = value;
        } else if (key == "charge") {
            config.charge = value;
        } else if (key == "decay_rate") {
            config.decay_rate = value;
        } else if (key == "detuning") {
            config.detuning = value;
        } else if (key == "cavity_finesse") {
            config.cavity_finesse = value;
        } else if (key == "cavity_linewidth") {
            config.cavity_linewidth = value;
        } else if (key == "radial_frequency") {
            config.radial_frequency = value;
        } else {
            throw ConfigError("unknown configuration key '" + key + "'");
        }
    }
    validate(config);
    return config;
}

FileConfig parse_config_text(const std::string& text) {
    FileConfig out;
    std::istringstream stream(text);
    std::string line;
    int lineno = 0;
    while (std::getline(stream, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const double value = parse_double(key, trim(line.substr(eq + 1)));

        if (key == "mass_amu") {
            require_positive("mass_amu", value);
            out.trap.ion_mass = value * constants::atomic_mass_unit;
        } else if (key == "wavelength_nm") {
            out.trap.wavelength = value * 1e-9;
        } else if (key == "g0_2pi_mhz") {
            out.trap.g0 = constants::two_pi * value * 1e6;
        } else if (key == "num_ions") {
            out.trap.num_ions = to_ion_count("num_ions", value);
        } else if (key == "temperature_uk") {
            out.run.temperature = value * 1e-6;
        } else if (key == "doppler_temperature_uk") {
            out.trap.doppler_temperature = value * 1e-6;
        } else if (key == "secular_freq_khz_min") {
            out.run.freq_min = constants::two_pi * value * 1e3;
        } else if (key == "secular_freq_khz_max") {
            out.run.freq_max = constants::two_pi * value * 1e3;
        } else {
            throw ConfigError("unknown configuration key '" + key + "'");
        }
    }
    validate(out.trap);
    if (out.run.freq_min && out.run.freq_max && !(*out.run.freq_min < *out.run.freq_max)) {
        throw ConfigError("secular_freq_khz_min must be below secular_freq_khz_max");
    }
    return out;
}

FileConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_config_text(buffer.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string config_to_text(const TrapConfig& trap, const RunSettings& run) {
    std::ostringstream out;
    out << "mass_amu = " << format_full(trap.ion_mass / constants::atomic_mass_unit) << "\n";
    out << "wavelength_nm = " << format_full(trap.wavelength * 1e9) << "\n";
    out << "g0_2pi_mhz = " << format_full(trap.g0 / (constants::two_pi * 1e6)) << "\n";
    out << "num_ions = " << trap.num_ions << "\n";
    out << "doppler_temperature_uk = " << format_full(trap.doppler_temperature * 1e6) << "\n";
    if (run.temperature) {
        out << "temperature_uk = " << format_full(*run.temperature * 1e6) << "\n";
    }
    if (run.freq_min) {
        out << "secular_freq_khz_min = "
            << format_full(*run.freq_min / (constants::two_pi * 1e3)) << "\n";
    }
    if (run.freq_max) {
        out << "secular_freq_khz_max = "
            << format_full(*run.freq_max / (constants::two_pi * 1e3)) << "\n";
    }
    return out.str();
}

void save_config_file(const std::string& path, const TrapConfig& trap,
                      const RunSettings& run) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write configuration file '" + path + "'");
    out << config_to_text(trap, run);
}

} // namespace ioncavity
