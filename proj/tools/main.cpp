#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ioncavity/acceptance.hpp"
#include "ioncavity/chain.hpp"
#include "ioncavity/config.hpp"
#include "ioncavity/constants.hpp"
#include "ioncavity/coupling.hpp"
#include "ioncavity/csv.hpp"
#include "ioncavity/errors.hpp"
#include "ioncavity/fit.hpp"
#include "ioncavity/manifest.hpp"
#include "ioncavity/scan.hpp"
#include "ioncavity/thermal.hpp"
#include "ioncavity/version.hpp"

namespace {

using ioncavity::constants::two_pi;
using json = nlohmann::ordered_json;

double angular_from_khz(double freq_khz) { return two_pi * freq_khz * 1e3; }
double khz_from_angular(double omega) { return omega / (two_pi * 1e3); }

// Everything a subcommand might need; each registers only the flags it uses.
struct Options {
    std::string config_path;
    int ions = 0;
    double freq_khz = 0.0;
    std::string freq_range;
    double temp_td = 1.5;
    uint64_t seed = 1;
    std::string out;
    std::string objective = "visibility";
    double step_khz = 0.5;
    // simulate-only knobs
    double span_nm = 0.0;  // 0 means two wavelengths of the configured line
    int points = 64;
    double bin_ms = 100.0;
    double rate = 2000.0;
    bool dataset = false;
    double sigma = 0.02;
    double nu0_khz = 0.0;
    std::string input;
};

struct Resolved {
    ioncavity::FileConfig file;
    bool temp_given = false;
    bool ions_given = false;
};

// True when the subcommand both registers the flag and saw it on the line.
bool flag_given(const CLI::App* sub, const std::string& name) {
    const CLI::Option* option = sub->get_option_no_throw(name);
    return option != nullptr && option->count() > 0;
}

Resolved resolve(const CLI::App* sub, const Options& opts) {
    Resolved resolved;
    if (!opts.config_path.empty()) {
        resolved.file = ioncavity::load_config_file(opts.config_path);
    }
    resolved.ions_given = flag_given(sub, "--ions");
    if (resolved.ions_given) {
        resolved.file.trap.num_ions = opts.ions;
    }
    ioncavity::validate(resolved.file.trap);
    resolved.temp_given = flag_given(sub, "--temp-td");
    return resolved;
}

double resolve_temperature(const Resolved& resolved, const Options& opts) {
    if (resolved.temp_given) {
        return opts.temp_td * resolved.file.trap.doppler_temperature;
    }
    if (resolved.file.run.temperature) {
        return *resolved.file.run.temperature;
    }
    return opts.temp_td * resolved.file.trap.doppler_temperature;
}

std::pair<double, double> parse_range_khz(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw std::invalid_argument("frequency range must look like lo:hi (kHz)");
    }
    double lo = 0.0;
    double hi = 0.0;
    try {
        std::size_t used = 0;
        lo = std::stod(text.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument(text);
        const std::string hi_text = text.substr(colon + 1);
        hi = std::stod(hi_text, &used);
        if (used != hi_text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse frequency range '" + text + "'");
    }
    if (!(lo > 0.0) || !(hi > lo)) {
        throw std::invalid_argument("frequency range needs 0 < lo < hi");
    }
    return {lo, hi};
}

// Range from the flag if present, otherwise from the config file.
std::pair<double, double> resolve_range_khz(const Resolved& resolved,
                                            const Options& opts) {
    if (!opts.freq_range.empty()) {
        return parse_range_khz(opts.freq_range);
    }
    if (resolved.file.run.freq_min && resolved.file.run.freq_max) {
        return {khz_from_angular(*resolved.file.run.freq_min),
                khz_from_angular(*resolved.file.run.freq_max)};
    }
    throw std::invalid_argument(
        "no frequency range given (--freq-range-khz or config file)");
}

std::vector<double> make_grid(double lo_khz, double hi_khz, double step_khz) {
    if (!(step_khz > 0.0)) {
        throw std::invalid_argument("grid step must be positive");
    }
    const int points =
        1 + static_cast<int>(std::lround((hi_khz - lo_khz) / step_khz));
    const int n = std::max(points, 2);
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        grid[static_cast<std::size_t>(i)] = angular_from_khz(
            lo_khz + (hi_khz - lo_khz) * i / static_cast<double>(n - 1));
    }
    return grid;
}

void warn_if_buckling(const ioncavity::TrapConfig& config, double omega) {
    if (!ioncavity::chain_expected_linear(config, omega)) {
        std::cerr << "warning: axial confinement at "
                  << ioncavity::csv::format_number(khz_from_angular(omega))
                  << " kHz exceeds the zigzag threshold for " << config.num_ions
                  << " ions; results assume the string stays linear\n";
    }
}

ioncavity::RunManifest base_manifest(const std::string& command,
                                     const Options& opts) {
    ioncavity::RunManifest manifest;
    manifest.command = command;
    manifest.config_path = opts.config_path;
    return manifest;
}

// Writes to stdout, or to --out plus a manifest sidecar.
void emit(const std::string& text, const Options& opts,
          ioncavity::RunManifest manifest) {
    if (opts.out.empty()) {
        std::cout << text;
        return;
    }
    ioncavity::csv::write_text_file(opts.out, text);
    manifest.output_path = opts.out;
    ioncavity::write_manifest_sidecar(manifest, opts.out);
}

void add_param(ioncavity::RunManifest& manifest, const std::string& key,
               double value) {
    manifest.parameters.emplace_back(key, ioncavity::csv::format_number(value));
}

void add_param(ioncavity::RunManifest& manifest, const std::string& key,
               const std::string& value) {
    manifest.parameters.emplace_back(key, value);
}

int run_positions(const CLI::App* sub, const Options& opts) {
    const Resolved resolved = resolve(sub, opts);
    const double omega = angular_from_khz(opts.freq_khz);
    warn_if_buckling(resolved.file.trap, omega);
    const ioncavity::ChainSolution solution =
        ioncavity::solve_chain(resolved.file.trap, omega);
    std::ostringstream text;
    ioncavity::csv::write_positions(text, resolved.file.trap, solution);
    ioncavity::RunManifest manifest = base_manifest("positions", opts);
    add_param(manifest, "ions", static_cast<double>(resolved.file.trap.num_ions));
    add_param(manifest, "freq_khz", opts.freq_khz);
    emit(text.str(), opts, manifest);
    return 0;
}

int run_modes(const CLI::App* sub, const Options& opts) {
    const Resolved resolved = resolve(sub, opts);
    const double omega = angular_from_khz(opts.freq_khz);
    warn_if_buckling(resolved.file.trap, omega);
    const ioncavity::ChainSolution solution =
        ioncavity::solve_chain(resolved.file.trap, omega);
    std::ostringstream text;
    ioncavity::csv::write_modes(text, solution);
    ioncavity::RunManifest manifest = base_manifest("modes", opts);
    add_param(manifest, "ions", static_cast<double>(resolved.file.trap.num_ions));
    add_param(manifest, "freq_khz", opts.freq_khz);
    emit(text.str(), opts, manifest);
    return 0;
}

int run_visibility(const CLI::App* sub, const Options& opts) {
    const Resolved resolved = resolve(sub, opts);
    const double temperature = resolve_temperature(resolved, opts);
    ioncavity::RunManifest manifest = base_manifest("visibility", opts);
    add_param(manifest, "ions", static_cast<double>(resolved.file.trap.num_ions));
    add_param(manifest, "temp_td",
              temperature / resolved.file.trap.doppler_temperature);

    ioncavity::VisibilityCurve curve;
    if (sub->count("--freq-khz") > 0) {
        const double omega = angular_from_khz(opts.freq_khz);
        warn_if_buckling(resolved.file.trap, omega);
        const ioncavity::CouplingModel model =
            ioncavity::make_model(resolved.file.trap, omega, temperature);
        curve.push_back({omega, ioncavity::visibility(model), 0.0});
        add_param(manifest, "freq_khz", opts.freq_khz);
    } else {
        const auto [lo, hi] = resolve_range_khz(resolved, opts);
        warn_if_buckling(resolved.file.trap, angular_from_khz(hi));
        curve = ioncavity::visibility_curve(resolved.file.trap, temperature,
                                            make_grid(lo, hi, opts.step_khz));
        add_param(manifest, "freq_range_khz",
                  ioncavity::csv::format_number(lo) + ":" +
                      ioncavity::csv::format_number(hi));
        add_param(manifest, "step_khz", opts.step_khz);
    }
    std::ostringstream text;
    ioncavity::csv::write_visibility(text, curve);
    emit(text.str(), opts, manifest);
    return 0;
}

int run_g_tilde(const CLI::App* sub, const Options& opts) {
    const Resolved resolved = resolve(sub, opts);
    const double temperature = resolve_temperature(resolved, opts);
    const double omega = angular_from_khz(opts.freq_khz);
    warn_if_buckling(resolved.file.trap, omega);
    const ioncavity::CouplingModel model =
        ioncavity::make_model(resolved.file.trap, omega, temperature);
    const ioncavity::CouplingReport report = ioncavity::average_coupling(model);

    json record;
    record["freq_khz"] = opts.freq_khz;
    record["num_ions"] = resolved.file.trap.num_ions;
    record["phase_rad"] = report.phase_at_optimum;
    record["g_tilde"] = report.g_tilde;
    record["per_ion_couplings"] = report.per_ion_couplings;
    record["emission_peak_phase_rad"] = report.emission_peak_phase;
    record["g_tilde_emission_peak"] = report.g_tilde_at_emission_peak;

    ioncavity::RunManifest manifest = base_manifest("g-tilde", opts);
    add_param(manifest, "ions", static_cast<double>(resolved.file.trap.num_ions));
    add_param(manifest, "freq_khz", opts.freq_khz);
    add_param(manifest, "temp_td",
              temperature / resolved.file.trap.doppler_temperature);
    emit(record.dump(2) + "\n", opts, manifest);
    return 0;
}

int run_optimize(const CLI::App* sub, const Options& opts) {
    const Resolved resolved = resolve(sub, opts);
    const double temperature = resolve_temperature(resolved, opts);
    const auto [lo, hi] = resolve_range_khz(resolved, opts);
    warn_if_buckling(resolved.file.trap, angular_from_khz(hi));
    const ioncavity::Objective objective =
        opts.objective == "g-tilde" ? ioncavity::Objective::MaxGTilde
                                    : ioncavity::Objective::MaxVisibility;
    const ioncavity::FrequencyOptimum optimum = ioncavity::optimise_frequency(
        resolved.file.trap, temperature, angular_from_khz(lo), angular_from_khz(hi),
        objective);

    const ioncavity::CouplingModel model = ioncavity::make_model(
        resolved.file.trap, optimum.com_frequency, temperature);
    const ioncavity::CouplingReport report = ioncavity::average_coupling(model);
    const double half_wave = 0.5 * resolved.file.trap.wavelength;
    std::vector<double> positions_half_lambda;
    for (const double z : optimum.solution.positions) {
        positions_half_lambda.push_back(z / half_wave);
    }

    json record;
    record["freq_khz"] = khz_from_angular(optimum.com_frequency);
    record["objective"] = opts.objective;
    record["value"] = optimum.value;
    record["positions_half_lambda"] = positions_half_lambda;
    record["g_tilde"] = report.g_tilde;
    record["per_ion_couplings"] = report.per_ion_couplings;

    ioncavity::RunManifest manifest = base_manifest("optimize", opts);
    add_param(manifest, "ions", static_cast<double>(resolved.file.trap.num_ions));
    add_param(manifest, "freq_range_khz",
              ioncavity::csv::format_number(lo) + ":" +
                  ioncavity::csv::format_number(hi));
    add_param(manifest, "temp_td",
              temperature / resolved.file.trap.doppler_temperature);
    add_param(manifest, "objective", opts.objective);
    emit(record.dump(2) + "\n", opts, manifest);
    return 0;
}

int run_simulate(const CLI::App* sub, const Options& opts) {
    const Resolved resolved = resolve(sub, opts);
    const double temperature = resolve_temperature(resolved, opts);
    ioncavity::RunManifest manifest = base_manifest("simulate", opts);
    manifest.seed = opts.seed;
    add_param(manifest, "ions", static_cast<double>(resolved.file.trap.num_ions));
    add_param(manifest, "temp_td",
              temperature / resolved.file.trap.doppler_temperature);

    std::ostringstream text;
    if (opts.dataset) {
        const auto [lo, hi] = resolve_range_khz(resolved, opts);
        const ioncavity::SimulatedCurve curve = ioncavity::simulate_visibility_dataset(
            resolved.file.trap, temperature, angular_from_khz(opts.nu0_khz),
            make_grid(lo, hi, opts.step_khz), opts.sigma, opts.seed);
        ioncavity::csv::write_visibility(text, curve.points, true);
        add_param(manifest, "freq_range_khz",
                  ioncavity::csv::format_number(lo) + ":" +
                      ioncavity::csv::format_number(hi));
        add_param(manifest, "step_khz", opts.step_khz);
        add_param(manifest, "sigma", opts.sigma);
        add_param(manifest, "nu0_khz", opts.nu0_khz);
    } else {
        const double omega = angular_from_khz(opts.freq_khz);
        warn_if_buckling(resolved.file.trap, omega);
        const ioncavity::CouplingModel model =
            ioncavity::make_model(resolved.file.trap, omega, temperature);
        ioncavity::ScanSettings settings;
        settings.span = sub->count("--span-nm") > 0
                            ? opts.span_nm * 1e-9
                            : 2.0 * resolved.file.trap.wavelength;
        settings.num_points = opts.points;
        settings.bin_time = opts.bin_ms * 1e-3;
        settings.mean_rate = opts.rate;
        settings.seed = opts.seed;
        const ioncavity::ScanTrace trace = ioncavity::simulate_scan(model, settings);
        ioncavity::csv::write_scan(text, trace);
        add_param(manifest, "freq_khz", opts.freq_khz);
        add_param(manifest, "span_nm", settings.span * 1e9);
        add_param(manifest, "points", static_cast<double>(settings.num_points));
        add_param(manifest, "bin_ms", opts.bin_ms);
        add_param(manifest, "rate", opts.rate);
    }
    emit(text.str(), opts, manifest);
    return 0;
}

int run_fit(const CLI::App* sub, const Options& opts) {
    const Resolved resolved = resolve(sub, opts);
    const ioncavity::csv::Table table = ioncavity::csv::read_table_file(opts.input);

    json record;
    if (!table.columns.empty() && table.columns[0] == "displacement_nm") {
        const ioncavity::ScanTrace trace = ioncavity::csv::to_scan_trace(table);
        const ioncavity::ScanFit fit = ioncavity::fit_scan(trace);
        record["kind"] = "scan";
        record["offset_counts"] = fit.offset;
        record["amplitude_counts"] = fit.amplitude;
        record["visibility"] = fit.visibility;
        record["visibility_uncertainty"] = fit.visibility_uncertainty;
        record["phase_rad"] = fit.phase;
        record["period_nm"] = fit.period * 1e9;
        record["residual_rms_counts"] = fit.residual_rms;
        record["low_significance"] = fit.low_significance;
    } else {
        const ioncavity::VisibilityCurve data =
            ioncavity::csv::to_visibility_curve(table);
        const double initial_t =
            opts.temp_td * resolved.file.trap.doppler_temperature;
        const ioncavity::CurveFit fit =
            ioncavity::fit_visibility_curve(data, resolved.file.trap, initial_t);
        const double sigma_t = std::sqrt(fit.covariance[0][0]);
        const double sigma_nu = std::sqrt(fit.covariance[1][1]);
        record["kind"] = "curve";
        record["num_ions"] = resolved.file.trap.num_ions;
        record["temperature_uk"] = fit.temperature * 1e6;
        record["temperature_td"] =
            fit.temperature / resolved.file.trap.doppler_temperature;
        record["temperature_sigma_uk"] = sigma_t * 1e6;
        record["nu_offset_khz"] = khz_from_angular(fit.frequency_offset);
        record["nu_offset_sigma_khz"] = khz_from_angular(sigma_nu);
        record["correlation"] = fit.covariance[0][1] / (sigma_t * sigma_nu);
        record["chi_squared"] = fit.chi_squared;
        record["dof"] = fit.dof;
    }

    ioncavity::RunManifest manifest = base_manifest("fit", opts);
    add_param(manifest, "input", opts.input);
    add_param(manifest, "ions", static_cast<double>(resolved.file.trap.num_ions));
    emit(record.dump(2) + "\n", opts, manifest);
    return 0;
}

int run_reproduce(const Options& opts) {
    const std::string out_dir = opts.out.empty() ? "reproduction" : opts.out;
    const std::vector<ioncavity::checks::CriterionResult> results =
        ioncavity::checks::run_full_acceptance(out_dir);
    ioncavity::checks::print_results(std::cout, results);
    return ioncavity::checks::all_passed(results) ? 0 : 1;
}

void add_common(CLI::App* sub, Options& opts) {
    sub->add_option("--config", opts.config_path, "configuration file (key = value)");
    sub->add_option("--ions", opts.ions, "number of ions in the string")
        ->check(CLI::Range(1, 200));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Thermal ion strings in a standing-wave cavity: chain structure, "
        "fringe contrast, coupling optimisation, synthetic scans and fits"};
    app.set_version_flag("--version", ioncavity::kVersion);
    app.require_subcommand(1);

    Options opts;
    int exit_code = 0;

    CLI::App* positions = app.add_subcommand(
        "positions", "equilibrium ion positions along the trap axis (CSV)");
    add_common(positions, opts);
    positions->add_option("--freq-khz", opts.freq_khz, "COM secular frequency, kHz")
        ->required()
        ->check(CLI::PositiveNumber);
    positions->add_option("--out", opts.out, "output file (default stdout)");
    positions->callback(
        [&] { exit_code = run_positions(positions, opts); });

    CLI::App* modes = app.add_subcommand(
        "modes", "axial normal modes: eigenvalues, frequencies, vectors (CSV)");
    add_common(modes, opts);
    modes->add_option("--freq-khz", opts.freq_khz, "COM secular frequency, kHz")
        ->required()
        ->check(CLI::PositiveNumber);
    modes->add_option("--out", opts.out, "output file (default stdout)");
    modes->callback([&] { exit_code = run_modes(modes, opts); });

    CLI::App* visibility = app.add_subcommand(
        "visibility", "fringe visibility at one frequency or over a range (CSV)");
    add_common(visibility, opts);
    visibility->add_option("--freq-khz", opts.freq_khz, "single COM frequency, kHz")
        ->check(CLI::PositiveNumber);
    visibility->add_option("--freq-range-khz", opts.freq_range,
                           "frequency range lo:hi, kHz");
    visibility->add_option("--temp-td", opts.temp_td,
                           "temperature in Doppler units (default 1.5)");
    visibility->add_option("--step-khz", opts.step_khz,
                           "grid step for ranges (default 0.5)");
    visibility->add_option("--out", opts.out, "output file (default stdout)");
    visibility->callback([&] { exit_code = run_visibility(visibility, opts); });

    CLI::App* g_tilde = app.add_subcommand(
        "g-tilde", "normalised average coupling at the best cavity placement");
    add_common(g_tilde, opts);
    g_tilde->add_option("--freq-khz", opts.freq_khz, "COM secular frequency, kHz")
        ->required()
        ->check(CLI::PositiveNumber);
    g_tilde->add_option("--temp-td", opts.temp_td,
                        "temperature in Doppler units (default 1.5)");
    g_tilde->add_option("--out", opts.out, "output file (default stdout)");
    g_tilde->callback([&] { exit_code = run_g_tilde(g_tilde, opts); });

    CLI::App* optimize = app.add_subcommand(
        "optimize", "best COM frequency in a range for a chosen objective");
    add_common(optimize, opts);
    optimize->add_option("--freq-range-khz", opts.freq_range,
                         "frequency range lo:hi, kHz");
    optimize->add_option("--temp-td", opts.temp_td,
                         "temperature in Doppler units (default 1.5)");
    optimize
        ->add_option("--objective", opts.objective,
                     "visibility or g-tilde (default visibility)")
        ->check(CLI::IsMember({"visibility", "g-tilde"}));
    optimize->add_option("--out", opts.out, "output file (default stdout)");
    optimize->callback([&] { exit_code = run_optimize(optimize, opts); });

    CLI::App* simulate = app.add_subcommand(
        "simulate", "synthetic photon-count scan, or visibility dataset "
                    "with --dataset (CSV)");
    add_common(simulate, opts);
    simulate->add_option("--freq-khz", opts.freq_khz,
                         "COM secular frequency, kHz (scan mode)");
    simulate->add_option("--freq-range-khz", opts.freq_range,
                         "frequency range lo:hi, kHz (dataset mode)");
    simulate->add_option("--temp-td", opts.temp_td,
                         "temperature in Doppler units (default 1.5)");
    simulate->add_option("--seed", opts.seed, "RNG seed (default 1)");
    simulate->add_option("--span-nm", opts.span_nm,
                         "scan span, nm (default two wavelengths)");
    simulate->add_option("--points", opts.points, "scan points (default 64)")
        ->check(CLI::Range(8, 100000));
    simulate->add_option("--bin-ms", opts.bin_ms, "bin time, ms (default 100)");
    simulate->add_option("--rate", opts.rate,
                         "mean count rate, 1/s (default 2000)");
    simulate->add_flag("--dataset", opts.dataset,
                       "emit a visibility-vs-frequency dataset instead of a scan");
    simulate->add_option("--sigma", opts.sigma,
                         "visibility noise for --dataset (default 0.02)");
    simulate->add_option("--nu0-khz", opts.nu0_khz,
                         "frequency-axis offset for --dataset (default 0)");
    simulate->add_option("--step-khz", opts.step_khz,
                         "dataset grid step (default 0.5)");
    simulate->add_option("--out", opts.out, "output file")->required();
    simulate->callback([&] { exit_code = run_simulate(simulate, opts); });

    CLI::App* fit = app.add_subcommand(
        "fit", "fit a scan (displacement_nm,counts) or visibility dataset "
               "(freq_khz,visibility,sigma)");
    add_common(fit, opts);
    fit->add_option("input", opts.input, "input CSV file")->required();
    fit->add_option("--temp-td", opts.temp_td,
                    "initial temperature guess in Doppler units (default 1.5)");
    fit->add_option("--out", opts.out, "output file (default stdout)");
    fit->callback([&] { exit_code = run_fit(fit, opts); });

    CLI::App* reproduce = app.add_subcommand(
        "reproduce", "run the acceptance suite and print its pass/fail table");
    reproduce->add_option("--out", opts.out,
                          "artifact directory (default ./reproduction)");
    reproduce->callback([&] { exit_code = run_reproduce(opts); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& help) {
        return app.exit(help);
    } catch (const CLI::CallForAllHelp& help) {
        return app.exit(help);
    } catch (const CLI::CallForVersion& version) {
        return app.exit(version);
    } catch (const CLI::ParseError& error) {
        app.exit(error);
        return 2;
    } catch (const ioncavity::FitError& error) {
        std::cerr << "fit error: " << error.what() << "\n";
        return 1;
    } catch (const ioncavity::NumericError& error) {
        std::cerr << "numeric error: " << error.what() << "\n";
        return 1;
    } catch (const ioncavity::ConfigError& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 2;
    } catch (const std::domain_error& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 2;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 1;
    }
    return exit_code;
}
