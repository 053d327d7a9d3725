#include "ioncavity/thermal.hpp"

#include <cmath>
#include <stdexcept>

namespace ioncavity {

ThermalState thermal_spreads(const TrapConfig& config,
                             const ChainSolution& solution, double temperature) {
    if (!(temperature >= 0.0)) {
        throw std::domain_error("temperature must be non-negative");
    }
    if (!solution.has_modes()) {
        throw std::invalid_argument("thermal_spreads requires normal modes");
    }
    const int n = solution.num_ions;
    ThermalState state;
    state.temperature = temperature;
    state.mode_spreads.resize(n);
    state.ion_spreads.resize(n);

    const double base_variance = 2.0 * constants::boltzmann * temperature /
                                 (config.ion_mass * solution.com_frequency *
                                  solution.com_frequency);
    for (int j = 0; j < n; ++j) {
        state.mode_spreads[j] = std::sqrt(base_variance / solution.mode_eigenvalues[j]);
    }
    for (int i = 0; i < n; ++i) {
        double var = 0.0;
        for (int j = 0; j < n; ++j) {
            const double c = solution.mode_component(i, j) * state.mode_spreads[j];
            var += c * c;
        }
        state.ion_spreads[i] = std::sqrt(var);
    }
    return state;
}

LocalisationReport verify_localisation_theorem(const TrapConfig& config,
                                               const ChainSolution& solution,
                                               double temperature) {
    if (solution.num_ions < 2) {
        throw std::invalid_argument(
            "localisation check needs at least two ions");
    }
    const ThermalState state = thermal_spreads(config, solution, temperature);
    LocalisationReport report;
    report.com_spread = state.mode_spreads[0];
    report.margins.resize(solution.num_ions);
    report.holds = true;
    for (int i = 0; i < solution.num_ions; ++i) {
        report.margins[i] = report.com_spread - state.ion_spreads[i];
        if (!(report.margins[i] > 0.0)) report.holds = false;
    }
    return report;
}

} // namespace ioncavity
