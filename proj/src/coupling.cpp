#include "ioncavity/coupling.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "ioncavity/errors.hpp"
#include "ioncavity/parallel.hpp"

namespace ioncavity {

namespace {

constexpr int kPhaseGridPoints = 16384;   // dense |cos| scan for g-tilde
constexpr double kGoldenTol = 1e-13;

// Golden-section maximisation of a unimodal function on [a, b].
template <typename F>
double golden_maximise(F&& f, double a, double b, double tol = kGoldenTol) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > tol * (1.0 + std::abs(a) + std::abs(b))) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

// Resultant of the per-ion fringe phasors, sum_i w_i e^{i 2 k z_i}.
std::complex<double> fringe_resultant(const CouplingModel& model) {
    const double k = model.config.wavenumber();
    std::complex<double> s{0.0, 0.0};
    for (int i = 0; i < model.solution.num_ions; ++i) {
        const double dz = model.thermal.ion_spreads[i];
        const double w = std::exp(-k * k * dz * dz);
        const double arg = 2.0 * k * model.solution.positions[i];
        s += w * std::complex<double>(std::cos(arg), std::sin(arg));
    }
    return s;
}

double mean_abs_coupling(const CouplingModel& model, double theta) {
    const double k = model.config.wavenumber();
    double sum = 0.0;
    for (int i = 0; i < model.solution.num_ions; ++i) {
        sum += std::abs(std::cos(k * model.solution.positions[i] + theta));
    }
    return sum / model.solution.num_ions;
}

double wrap_phase_pi(double theta) {
    theta = std::fmod(theta, constants::pi);
    if (theta < 0.0) theta += constants::pi;
    return theta;
}

} // namespace

void validate(const CouplingModel& model) {
    const int n = model.solution.num_ions;
    if (n < 1) throw std::invalid_argument("coupling model has no ions");
    if (static_cast<int>(model.solution.positions.size()) != n ||
        static_cast<int>(model.thermal.ion_spreads.size()) != n) {
        throw std::invalid_argument(
            "coupling model pieces describe different ion counts");
    }
}

CouplingModel make_model(const TrapConfig& config, double com_frequency,
                         double temperature) {
    CouplingModel model;
    model.config = config;
    model.solution = solve_chain(config, com_frequency);
    model.thermal = thermal_spreads(config, model.solution, temperature);
    return model;
}

double coupling_strength(const TrapConfig& config, double z) {
    return config.g0 * std::cos(config.wavenumber() * z);
}

double emission_at_phase(const CouplingModel& model, double phase) {
    const double k = model.config.wavenumber();
    double w_total = 0.0;
    for (int i = 0; i < model.solution.num_ions; ++i) {
        const double dz = model.thermal.ion_spreads[i];
        const double contrast = std::exp(-k * k * dz * dz);
        w_total += 1.0 + contrast * std::cos(2.0 * k * model.solution.positions[i] + phase);
    }
    return w_total;
}

double emission_profile(const CouplingModel& model, double displacement) {
    return emission_at_phase(model, 2.0 * model.config.wavenumber() * displacement);
}

double visibility(const CouplingModel& model) {
    validate(model);
    return std::abs(fringe_resultant(model)) / model.solution.num_ions;
}

VisibilityCurve visibility_curve(const TrapConfig& config, double temperature,
                                 std::span<const double> freq_grid) {
    if (freq_grid.empty()) {
        throw std::domain_error("frequency grid must be non-empty");
    }
    for (size_t i = 1; i < freq_grid.size(); ++i) {
        if (!(freq_grid[i] > freq_grid[i - 1])) {
            throw std::domain_error("frequency grid must be strictly ascending");
        }
    }
    VisibilityCurve curve(freq_grid.size());
    parallel_for(static_cast<int>(freq_grid.size()), [&](int i) {
        const double freq = freq_grid[i];
        try {
            const CouplingModel model = make_model(config, freq, temperature);
            curve[i] = {freq, visibility(model), 0.0};
        } catch (const NumericError& e) {
            throw NumericError(std::string(e.what()) + " (at " +
                               std::to_string(freq / (constants::two_pi * 1e3)) +
                               " kHz)");
        }
    });
    return curve;
}

CouplingReport average_coupling(const CouplingModel& model) {
    validate(model);
    const double k = model.config.wavenumber();

    // |cos| gives the coupling a period of pi in the displacement phase.
    // Dense scan to isolate the global peak, golden-section to polish it;
    // the scan is fine enough that the bracket holds a single extremum.
    auto objective = [&](double theta) { return mean_abs_coupling(model, theta); };
    const double step = constants::pi / kPhaseGridPoints;
    double best_theta = 0.0;
    double best_value = objective(0.0);
    for (int i = 1; i < kPhaseGridPoints; ++i) {
        const double value = objective(i * step);
        if (value > best_value) {
            best_value = value;
            best_theta = i * step;
        }
    }
    const double theta_star =
        wrap_phase_pi(golden_maximise(objective, best_theta - step, best_theta + step));

    CouplingReport report;
    report.phase_at_optimum = theta_star;
    report.per_ion_couplings.resize(model.solution.num_ions);
    double sum = 0.0;
    for (int i = 0; i < model.solution.num_ions; ++i) {
        report.per_ion_couplings[i] =
            std::abs(std::cos(k * model.solution.positions[i] + theta_star));
        sum += report.per_ion_couplings[i];
    }
    report.g_tilde = sum / model.solution.num_ions;

    // Alternative: place the cavity at the emission peak. W(phi) is a pure
    // sinusoid, so its maximum sits at phi = -arg(resultant); the
    // displacement phase is half the fringe phase.
    const std::complex<double> s = fringe_resultant(model);
    const double phi_peak = (std::abs(s) > 0.0) ? -std::arg(s) : 0.0;
    report.emission_peak_phase = wrap_phase_pi(0.5 * phi_peak);
    report.g_tilde_at_emission_peak = mean_abs_coupling(model, report.emission_peak_phase);
    return report;
}

FrequencyOptimum optimise_frequency(const TrapConfig& config, double temperature,
                                    double freq_lo, double freq_hi,
                                    Objective objective, int grid_points) {
    if (!(freq_lo > 0.0) || !(freq_hi > freq_lo)) {
        throw std::domain_error("invalid frequency range");
    }
    if (grid_points < 2) throw std::domain_error("grid needs at least 2 points");

    auto evaluate = [&](double freq) {
        const CouplingModel model = make_model(config, freq, temperature);
        return objective == Objective::MaxVisibility ? visibility(model)
                                                     : average_coupling(model).g_tilde;
    };

    std::vector<double> values(grid_points);
    const double step = (freq_hi - freq_lo) / (grid_points - 1);
    parallel_for(grid_points, [&](int i) { values[i] = evaluate(freq_lo + i * step); });

    // Strict comparison keeps the lowest frequency on ties.
    int best = 0;
    for (int i = 1; i < grid_points; ++i) {
        if (values[i] > values[best]) best = i;
    }

    const double lo = std::max(freq_lo, freq_lo + (best - 1) * step);
    const double hi = std::min(freq_hi, freq_lo + (best + 1) * step);
    double refined = golden_maximise(evaluate, lo, hi, 1e-12);
    if (!(evaluate(refined) > values[best])) refined = freq_lo + best * step;

    FrequencyOptimum optimum;
    optimum.com_frequency = refined;
    optimum.value = evaluate(refined);
    optimum.solution = solve_chain(config, refined);
    return optimum;
}

} // namespace ioncavity
