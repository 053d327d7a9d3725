#include "ioncavity/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ioncavity/chain.hpp"
#include "ioncavity/config.hpp"
#include "ioncavity/constants.hpp"
#include "ioncavity/coupling.hpp"
#include "ioncavity/csv.hpp"
#include "ioncavity/fit.hpp"
#include "ioncavity/oracles.hpp"
#include "ioncavity/rng.hpp"
#include "ioncavity/scan.hpp"
#include "ioncavity/thermal.hpp"

namespace ioncavity::checks {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string fmt(const char* format, ...) {
    char buffer[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buffer, sizeof(buffer), format, args);
    va_end(args);
    return buffer;
}

void write_json_file(const std::string& path, const json& doc) {
    csv::write_text_file(path, doc.dump(2) + "\n");
}

TrapConfig config_for(int ions) {
    TrapConfig config;
    config.num_ions = ions;
    return config;
}

double khz(double angular) { return angular / (constants::two_pi * 1e3); }
double angular(double freq_khz) { return constants::two_pi * freq_khz * 1e3; }

// ---- criterion 1: one-ion contrast / spread / temperature consistency ----
bool triangle(const std::string& dir, std::string& details) {
    const TrapConfig config = config_for(1);
    const double omega = angular(620.0);
    const double t_doppler = config.doppler_temperature;
    const double k = config.wavenumber();
    const double spread_target = 133e-9;
    const double contrast_target = 0.39;
    const double temp_target = 1.2 * t_doppler;

    const double spread_at_temp =
        make_model(config, omega, temp_target).thermal.ion_spreads[0];
    const double rel_spread = std::abs(spread_at_temp - spread_target) / spread_target;

    const double temp_at_spread = spread_target * spread_target * config.ion_mass *
                                  omega * omega / (2.0 * constants::boltzmann);
    const double contrast_at_spread =
        visibility(make_model(config, omega, temp_at_spread));
    const double rel_contrast =
        std::abs(contrast_at_spread - contrast_target) / contrast_target;

    const double spread_sq_at_contrast = -std::log(contrast_target) / (k * k);
    const double temp_at_contrast = spread_sq_at_contrast * config.ion_mass * omega *
                                    omega / (2.0 * constants::boltzmann);
    const double rel_temp = std::abs(temp_at_contrast - temp_target) / temp_target;

    write_json_file(dir + "/triangle.json",
                    json{{"com_freq_khz", 620.0},
                         {"spread_at_1p2_td_nm", spread_at_temp * 1e9},
                         {"visibility_at_133_nm", contrast_at_spread},
                         {"temperature_at_v39_td", temp_at_contrast / t_doppler},
                         {"relative_closure",
                          json{{"spread", rel_spread},
                               {"visibility", rel_contrast},
                               {"temperature", rel_temp}}}});

    details = fmt("dz=%.2f nm (%.2f%%), V=%.4f (%.2f%%), T=%.4f Td (%.2f%%)",
                  spread_at_temp * 1e9, 100.0 * rel_spread, contrast_at_spread,
                  100.0 * rel_contrast, temp_at_contrast / t_doppler,
                  100.0 * rel_temp);
    return rel_spread <= 0.03 && rel_contrast <= 0.03 && rel_temp <= 0.03;
}

// ---- criterion 2: two-ion contrast beats one ion at matched spacing ----
bool two_ion(const std::string& dir, std::string& details) {
    const double omega_454 = angular(454.0);
    const TrapConfig one = config_for(1);
    const TrapConfig two = config_for(2);
    const double temp = 1.5 * one.doppler_temperature;
    const double half_wave = 0.5 * one.wavelength;

    const double v_single = visibility(make_model(one, omega_454, temp));

    // Nearest frequency where the two-ion spacing is an integer number of
    // half-wavelengths; spacing scales as omega^(-2/3).
    const ChainSolution at_454 = solve_chain(two, omega_454);
    const double spacing_454 = at_454.positions[1] - at_454.positions[0];
    const double multiple = std::round(spacing_454 / half_wave);
    const double omega_comm =
        omega_454 * std::pow(spacing_454 / (multiple * half_wave), 1.5);
    const ChainSolution commensurate = solve_chain(two, omega_comm);
    const double spacing_comm = commensurate.positions[1] - commensurate.positions[0];
    const double v_double = visibility(make_model(two, omega_comm, temp));

    write_json_file(dir + "/two_ion.json",
                    json{{"temperature_td", 1.5},
                         {"single_ion_visibility", v_single},
                         {"commensurate_freq_khz", khz(omega_comm)},
                         {"spacing_half_wavelengths", spacing_comm / half_wave},
                         {"two_ion_visibility", v_double}});

    details = fmt("V1=%.4f, V2=%.4f at %.2f kHz (spacing %.3f half-waves)",
                  v_single, v_double, khz(omega_comm), spacing_comm / half_wave);
    return v_single >= 0.10 && v_single <= 0.13 && v_double >= 0.22 &&
           v_double <= 0.26 &&
           std::abs(spacing_comm / half_wave - multiple) < 1e-6;
}

// ---- criterion 3: three-ion spacings and contrast maxima line up ----
bool three_ion(const std::string& dir, std::string& details) {
    const TrapConfig three = config_for(3);
    const double half_wave = 0.5 * three.wavelength;
    const double temp = 1.56 * three.doppler_temperature;

    const double freqs_khz[3] = {411.0, 444.0, 482.0};
    const double spacing_targets[3] = {20.0, 19.0, 18.0};
    double spacings[3];
    bool spacings_ok = true;
    for (int i = 0; i < 3; ++i) {
        const ChainSolution solution = solve_chain(three, angular(freqs_khz[i]));
        spacings[i] = (solution.positions[1] - solution.positions[0]) / half_wave;
        spacings_ok = spacings_ok && std::abs(spacings[i] - spacing_targets[i]) <= 0.2;
    }

    std::vector<double> grid;
    for (double f = 400.0; f <= 500.0 + 1e-9; f += 0.25) {
        grid.push_back(angular(f));
    }
    const VisibilityCurve curve = visibility_curve(three, temp, grid);

    std::vector<double> peaks_khz;
    for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
        if (curve[i].visibility > curve[i - 1].visibility &&
            curve[i].visibility > curve[i + 1].visibility) {
            peaks_khz.push_back(khz(curve[i].com_frequency));
        }
    }
    bool peaks_ok = true;
    double worst_distance = 0.0;
    for (const double target : freqs_khz) {
        double nearest = 1e300;
        for (const double peak : peaks_khz) {
            nearest = std::min(nearest, std::abs(peak - target));
        }
        worst_distance = std::max(worst_distance, nearest);
        peaks_ok = peaks_ok && nearest <= 3.0;
    }

    {
        std::ostringstream csv_text;
        csv::write_visibility(csv_text, curve);
        csv::write_text_file(dir + "/three_ion_curve.csv", csv_text.str());
    }
    write_json_file(dir + "/three_ion.json",
                    json{{"temperature_td", 1.56},
                         {"spacings_half_wavelengths",
                          json{{"411_khz", spacings[0]},
                               {"444_khz", spacings[1]},
                               {"482_khz", spacings[2]}}},
                         {"curve_peaks_khz", peaks_khz}});

    details = fmt("spacings %.3f/%.3f/%.3f half-waves, worst peak offset %.2f kHz",
                  spacings[0], spacings[1], spacings[2], worst_distance);
    return spacings_ok && peaks_ok;
}

// ---- criterion 4: best-case average coupling of rigid 4/5-ion strings ----
CouplingModel rigid_model(int ions, const std::vector<double>& half_wave_positions) {
    CouplingModel model;
    model.config = config_for(ions);
    model.solution.num_ions = ions;
    model.solution.com_frequency = angular(444.0);
    model.solution.length_scale = 1.0;
    const double half_wave = 0.5 * model.config.wavelength;
    for (const double h : half_wave_positions) {
        model.solution.positions.push_back(h * half_wave);
    }
    model.thermal.temperature = 0.0;
    model.thermal.mode_spreads.assign(static_cast<std::size_t>(ions), 0.0);
    model.thermal.ion_spreads.assign(static_cast<std::size_t>(ions), 0.0);
    return model;
}

bool optimal_coupling(const std::string& dir, std::string& details) {
    // Four ions, gaps (outer, inner, outer) = (16.1, 14.9, 16.1).
    const CouplingModel four = rigid_model(4, {-23.55, -7.45, 7.45, 23.55});
    const CouplingReport four_report = average_coupling(four);

    // Five ions, gaps (16.9, 15.1, 15.1, 16.9).
    const CouplingModel five = rigid_model(5, {-32.0, -15.1, 0.0, 15.1, 32.0});
    const CouplingReport five_report = average_coupling(five);

    write_json_file(
        dir + "/gtilde.json",
        json{{"four_ion",
              json{{"g_tilde", four_report.g_tilde},
                   {"phase", four_report.phase_at_optimum},
                   {"g_tilde_emission_peak", four_report.g_tilde_at_emission_peak}}},
             {"five_ion",
              json{{"g_tilde", five_report.g_tilde},
                   {"phase", five_report.phase_at_optimum},
                   {"g_tilde_emission_peak", five_report.g_tilde_at_emission_peak}}}});

    details = fmt("4-ion g=%.6f, 5-ion g=%.6f (emission-peak %.6f)",
                  four_report.g_tilde, five_report.g_tilde,
                  five_report.g_tilde_at_emission_peak);
    const bool four_ok = std::abs(four_report.g_tilde - 0.988) <= 0.002;
    const bool five_ok = five_report.g_tilde >= 0.98 &&
                         five_report.g_tilde_at_emission_peak >= 0.98 &&
                         std::abs(five_report.g_tilde - 0.983) <= 0.01 &&
                         std::abs(five_report.g_tilde_at_emission_peak - 0.983) <= 0.01;
    return four_ok && five_ok;
}

// ---- criterion 5: every chain ion localises better than a free ion ----
bool localisation(const std::string& dir, std::string& details) {
    int cases = 0;
    double min_margin = 1e300;
    for (int ions = 2; ions <= 10; ++ions) {
        const TrapConfig config = config_for(ions);
        for (double freq = 400.0; freq <= 620.0 + 1e-9; freq += 20.0) {
            const ChainSolution solution = solve_chain(config, angular(freq));
            for (const double factor : {0.5, 1.0, 2.0}) {
                const LocalisationReport report = verify_localisation_theorem(
                    config, solution, factor * config.doppler_temperature);
                ++cases;
                for (const double margin : report.margins) {
                    min_margin = std::min(min_margin, margin);
                }
                if (!report.holds) {
                    details = fmt("violated at N=%d, %.0f kHz, %.1f Td", ions, freq,
                                  factor);
                    return false;
                }
            }
        }
    }
    write_json_file(dir + "/localisation.json",
                    json{{"cases", cases}, {"min_margin_nm", min_margin * 1e9}});
    details = fmt("%d cases, min margin %.2f nm", cases, min_margin * 1e9);
    return min_margin > 0.0;
}

// ---- criterion 6: closed forms vs independent oracles ----
bool oracle_agreement(const std::string& dir, std::string& details) {
    // (a) closed-form contrast vs dense fringe scan.
    SplitMix64 rng(20240817u);
    double max_contrast_dev = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int ions = 1 + static_cast<int>(rng.next() % 8);
        const double freq = angular(300.0 + 400.0 * rng.uniform());
        const TrapConfig config = config_for(ions);
        const double temp = (0.2 + 2.8 * rng.uniform()) * config.doppler_temperature;
        const CouplingModel model = make_model(config, freq, temp);
        const double dev =
            std::abs(visibility(model) - visibility_by_phase_scan(model, 4096));
        max_contrast_dev = std::max(max_contrast_dev, dev);
    }
    const bool contrast_ok = max_contrast_dev <= 1e-9;

    // (b) Newton equilibria vs gradient descent, in units of the length scale.
    double max_position_dev = 0.0;
    for (int ions = 1; ions <= 10; ++ions) {
        const TrapConfig config = config_for(ions);
        const ChainSolution newton = equilibrium_positions(config, angular(444.0));
        const std::vector<double> descent = equilibrium_by_descent(ions);
        for (int i = 0; i < ions; ++i) {
            const double u_newton = newton.positions[i] / newton.length_scale;
            max_position_dev =
                std::max(max_position_dev, std::abs(u_newton - descent[i]));
        }
    }
    const bool positions_ok = max_position_dev <= 1e-8;

    // (c) quadrature spreads vs Monte-Carlo sampling, five ions.
    const TrapConfig five = config_for(5);
    const ChainSolution solution = solve_chain(five, angular(444.0));
    const double temp = 1.72 * five.doppler_temperature;
    const ThermalState thermal = thermal_spreads(five, solution, temp);
    const MonteCarloSpreads sampled =
        spreads_by_sampling(five, solution, temp, 1000000, 424242u);
    double max_pull = 0.0;
    for (std::size_t i = 0; i < sampled.spreads.size(); ++i) {
        max_pull = std::max(max_pull,
                            std::abs(sampled.spreads[i] - thermal.ion_spreads[i]) /
                                sampled.standard_errors[i]);
    }
    const bool sampling_ok = max_pull <= 3.0;

    write_json_file(dir + "/oracles.json",
                    json{{"max_contrast_deviation", max_contrast_dev},
                         {"max_equilibrium_deviation", max_position_dev},
                         {"max_thermal_sampling_pull_sigma", max_pull}});
    details = fmt("contrast dev %.2e, equilibrium dev %.2e, sampling pull %.2f sigma",
                  max_contrast_dev, max_position_dev, max_pull);
    return contrast_ok && positions_ok && sampling_ok;
}

// ---- criterion 7: (T, offset) recovery from noisy synthetic curves ----
bool fit_recovery(const std::string& dir, std::string& details) {
    std::vector<double> grid;
    for (int i = 0; i < 45; ++i) {
        grid.push_back(angular(400.0 + 5.0 * static_cast<double>(i)));
    }

    std::ostringstream table;
    table << "trial,num_ions,t_true_td,t_fit_td,t_pull,nu_true_khz,nu_fit_khz,"
             "nu_pull,recovered\n";
    int successes = 0;
    double max_pull_t = 0.0;
    double max_pull_nu = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int ions = 1 + trial % 5;
        const TrapConfig config = config_for(ions);
        SplitMix64 draw = SplitMix64::substream(777u, static_cast<uint64_t>(trial));
        const double t_true = (1.0 + draw.uniform()) * config.doppler_temperature;
        const double nu_true = constants::two_pi * (-1300.0 + 2600.0 * draw.uniform());

        bool recovered = false;
        double t_fit = 0.0;
        double nu_fit = 0.0;
        double pull_t = -1.0;
        double pull_nu = -1.0;
        try {
            const SimulatedCurve data = simulate_visibility_dataset(
                config, t_true, nu_true, grid, 0.02,
                1000u + static_cast<uint64_t>(trial));
            const CurveFit fit = fit_visibility_curve(
                data.points, config, 1.5 * config.doppler_temperature);
            t_fit = fit.temperature;
            nu_fit = fit.frequency_offset;
            pull_t = std::abs(t_fit - t_true) / std::sqrt(fit.covariance[0][0]);
            pull_nu = std::abs(nu_fit - nu_true) / std::sqrt(fit.covariance[1][1]);
            recovered = pull_t <= 4.0 && pull_nu <= 4.0;
            max_pull_t = std::max(max_pull_t, pull_t);
            max_pull_nu = std::max(max_pull_nu, pull_nu);
        } catch (const std::exception&) {
            recovered = false;
        }
        successes += recovered ? 1 : 0;

        table << trial << ',' << ions << ','
              << csv::format_number(t_true / config.doppler_temperature) << ','
              << csv::format_number(t_fit / config.doppler_temperature) << ','
              << csv::format_number(pull_t) << ','
              << csv::format_number(nu_true / (constants::two_pi * 1e3)) << ','
              << csv::format_number(nu_fit / (constants::two_pi * 1e3)) << ','
              << csv::format_number(pull_nu) << ',' << (recovered ? 1 : 0) << '\n';
    }
    csv::write_text_file(dir + "/fit_recovery.csv", table.str());
    write_json_file(dir + "/fit_recovery.json",
                    json{{"trials", 100},
                         {"recovered", successes},
                         {"max_pull_temperature_sigma", max_pull_t},
                         {"max_pull_offset_sigma", max_pull_nu}});
    details = fmt("%d/100 recovered within 4 sigma (max pulls %.2f / %.2f)",
                  successes, max_pull_t, max_pull_nu);
    return successes >= 99;
}

struct CriterionEntry {
    int id;
    const char* name;
    double time_limit;
    std::function<bool(const std::string&, std::string&)> body;
};

CriterionResult run_one(const CriterionEntry& entry, const std::string& dir) {
    CriterionResult result;
    result.id = entry.id;
    result.name = entry.name;
    const auto start = std::chrono::steady_clock::now();
    try {
        result.passed = entry.body(dir, result.details);
    } catch (const std::exception& error) {
        result.passed = false;
        result.details = std::string("exception: ") + error.what();
    }
    result.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (result.passed && result.seconds >= entry.time_limit) {
        result.passed = false;
        result.details += fmt(" [exceeded %.0f s budget]", entry.time_limit);
    }
    return result;
}

} // namespace

std::vector<CriterionResult> run_reproduction(const std::string& out_dir) {
    fs::create_directories(out_dir);
    const std::vector<CriterionEntry> entries = {
        {1, "one-ion contrast-spread-temperature triangle", 1.0, triangle},
        {2, "two-ion contrast enhancement", 1.0, two_ion},
        {3, "three-ion commensurate maxima", 10.0, three_ion},
        {4, "optimal multi-ion coupling", 1.0, optimal_coupling},
        {5, "chain localisation property", 10.0, localisation},
        {6, "independent oracle agreement", 60.0, oracle_agreement},
        {7, "fit parameter recovery", 300.0, fit_recovery},
    };
    std::vector<CriterionResult> results;
    results.reserve(entries.size());
    for (const CriterionEntry& entry : entries) {
        results.push_back(run_one(entry, out_dir));
    }
    return results;
}

namespace {

std::vector<std::string> relative_files(const fs::path& root) {
    std::vector<std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file()) {
            files.push_back(fs::relative(entry.path(), root).string());
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream contents;
    contents << in.rdbuf();
    return contents.str();
}

} // namespace

std::vector<CriterionResult> run_full_acceptance(const std::string& work_dir) {
    const std::string run_a = work_dir + "/run_a";
    const std::string run_b = work_dir + "/run_b";
    std::vector<CriterionResult> results = run_reproduction(run_a);

    CriterionResult determinism;
    determinism.id = 8;
    determinism.name = "bitwise determinism";
    const auto start = std::chrono::steady_clock::now();
    try {
        run_reproduction(run_b);
        const std::vector<std::string> files_a = relative_files(run_a);
        const std::vector<std::string> files_b = relative_files(run_b);
        if (files_a != files_b) {
            determinism.passed = false;
            determinism.details = "artifact lists differ between runs";
        } else {
            determinism.passed = true;
            for (const std::string& file : files_a) {
                if (read_file(fs::path(run_a) / file) !=
                    read_file(fs::path(run_b) / file)) {
                    determinism.passed = false;
                    determinism.details = "byte difference in " + file;
                    break;
                }
            }
            if (determinism.passed) {
                determinism.details =
                    fmt("%zu artifacts byte-identical across reruns", files_a.size());
            }
        }
    } catch (const std::exception& error) {
        determinism.passed = false;
        determinism.details = std::string("exception: ") + error.what();
    }
    determinism.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    results.push_back(determinism);
    return results;
}

void print_results(std::ostream& out, const std::vector<CriterionResult>& results) {
    int passed = 0;
    for (const CriterionResult& result : results) {
        out << (result.passed ? "PASS" : "FAIL") << "  " << result.id << "  "
            << std::left << std::setw(44) << result.name << std::right << std::fixed
            << std::setprecision(2) << std::setw(7) << result.seconds << " s  "
            << result.details << "\n";
        passed += result.passed ? 1 : 0;
    }
    out << "acceptance: " << passed << "/" << results.size() << " criteria passed\n";
}

bool all_passed(const std::vector<CriterionResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CriterionResult& r) { return r.passed; });
}

} // namespace ioncavity::checks
