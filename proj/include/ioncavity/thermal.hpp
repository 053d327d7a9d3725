#pragma once

#include <vector>

#include "ioncavity/chain.hpp"

namespace ioncavity {

// Thermal positional spreads of a chain at a single temperature shared by
// all normal modes. mode_spreads[j] is the rms amplitude of mode j,
// ion_spreads[i] the resulting axial spread of ion i.
struct ThermalState {
    double temperature = 0.0;          // K
    std::vector<double> mode_spreads;  // m, strictly decreasing
    std::vector<double> ion_spreads;   // m
};

// Mode amplitude spreads DZ_j^2 = 2 kB T / (m omega_j^2) and the per-ion
// spreads dz_i^2 = sum_j (U_ij DZ_j)^2. The factor of 2 in the mode
// variance follows the convention used for the visibility analysis of this
// setup (it is what makes 39% visibility at 620 kHz correspond to 133 nm
// and 1.2 T_D); the textbook equipartition variance would be half as large.
ThermalState thermal_spreads(const TrapConfig& config,
                             const ChainSolution& solution, double temperature);

// Coulomb coupling localises every ion of a chain better than a free ion
// at the same temperature: dz_i < DZ_com for all i when N >= 2.
struct LocalisationReport {
    bool holds = false;
    double com_spread = 0.0;       // DZ of the centre-of-mass mode, m
    std::vector<double> margins;   // DZ_com - dz_i, m
};

// Evaluates the localisation inequality ion by ion. Requires N >= 2
// (throws std::invalid_argument otherwise).
LocalisationReport verify_localisation_theorem(const TrapConfig& config,
                                               const ChainSolution& solution,
                                               double temperature);

} // namespace ioncavity
