#pragma once

#include <span>
#include <vector>

#include "ioncavity/chain.hpp"
#include "ioncavity/thermal.hpp"

namespace ioncavity {

// Everything needed to evaluate the cavity emission of a thermal ion
// string: trap/cavity parameters, the chain geometry, and the per-ion
// thermal spreads. The pieces must describe the same string (matching ion
// counts); validate() enforces that.
struct CouplingModel {
    TrapConfig config;
    ChainSolution solution;
    ThermalState thermal;
};

void validate(const CouplingModel& model);

// Chain solve plus thermal spreads at the given COM secular frequency.
CouplingModel make_model(const TrapConfig& config, double com_frequency,
                         double temperature);

// Standing-wave coupling g(z) = g0 cos(k z), rad/s.
double coupling_strength(const TrapConfig& config, double z);

// Cavity emission rate of the string with the cavity displaced by
// `displacement` along its axis, in units of g0^2:
//   W = sum_i (1 + exp(-k^2 dz_i^2) cos(2 k z_i + phi)),  phi = 2 k displacement.
// Each ion contributes its antinode/node fringe, washed out by the
// Debye-Waller-type factor of its thermal spread.
double emission_profile(const CouplingModel& model, double displacement);

// Same fringe pattern parameterised directly by the offset phase phi.
double emission_at_phase(const CouplingModel& model, double phase);

// Fringe visibility (Wmax - Wmin)/(Wmax + Wmin) over a full displacement
// period, evaluated in closed form: V = |sum_i w_i e^{i 2 k z_i}| / N with
// w_i = exp(-k^2 dz_i^2). For one ion this reduces to V = w_1.
double visibility(const CouplingModel& model);

struct VisibilityPoint {
    double com_frequency = 0.0;  // rad/s
    double visibility = 0.0;     // in [0, 1]
    double uncertainty = 0.0;    // one sigma; 0 for model-generated points
};

using VisibilityCurve = std::vector<VisibilityPoint>;

// Model visibility across a grid of COM secular frequencies (ascending,
// rad/s) at a fixed temperature. Solver failures are annotated with the
// offending frequency. Grid points are evaluated in parallel.
VisibilityCurve visibility_curve(const TrapConfig& config, double temperature,
                                 std::span<const double> freq_grid);

// Normalised average coupling of the string at its best cavity placement.
// The primary convention maximises the average |cos| coupling itself over
// the displacement phase theta (g(z_i) = g0 cos(k z_i + theta), theta has
// period pi under the modulus). The emission-peak alternative places the
// cavity at the displacement maximising the total emission W instead; the
// two can differ when the Debye-Waller factors are unequal, so both are
// reported.
struct CouplingReport {
    double phase_at_optimum = 0.0;        // theta*, rad in [0, pi)
    double g_tilde = 0.0;                 // mean_i |cos(k z_i + theta*)|
    std::vector<double> per_ion_couplings;  // |g(z_i)| / g0 at theta*
    double emission_peak_phase = 0.0;     // alternative theta from the W peak
    double g_tilde_at_emission_peak = 0.0;
};

CouplingReport average_coupling(const CouplingModel& model);

enum class Objective { MaxVisibility, MaxGTilde };

struct FrequencyOptimum {
    double com_frequency = 0.0;  // rad/s
    double value = 0.0;          // objective at the optimum
    ChainSolution solution;
};

// Scans [freq_lo, freq_hi] (rad/s) on a dense grid, keeps the best point
// (ties resolved toward lower frequency), then refines it by golden-section
// search within the bracketing grid cells.
FrequencyOptimum optimise_frequency(const TrapConfig& config, double temperature,
                                    double freq_lo, double freq_hi,
                                    Objective objective, int grid_points = 2000);

} // namespace ioncavity
