#pragma once

#include <cstdint>
#include <vector>

#include "ioncavity/chain.hpp"
#include "ioncavity/coupling.hpp"

// Independent reference implementations used only by tests and the
// acceptance suite. Each deliberately avoids the algorithm used by the
// library proper: visibility by brute-force fringe sampling instead of the
// closed form, equilibria by energy descent instead of Newton root finding,
// thermal spreads by Monte-Carlo sampling instead of quadrature summation.
namespace ioncavity::checks {

// Fringe contrast (Wmax - Wmin)/(Wmax + Wmin) from a dense phase scan of
// the emission profile, with parabolic refinement of both extrema.
double visibility_by_phase_scan(const CouplingModel& model, int samples = 4096);

// Dimensionless equilibrium positions from gradient descent with Armijo
// backtracking on the chain potential  sum u_i^2/2 + sum_{i<j} 1/|u_i-u_j|.
// Converges to gradient infinity-norm <= tolerance.
std::vector<double> equilibrium_by_descent(int num_ions, double tolerance = 1e-11);

struct MonteCarloSpreads {
    std::vector<double> spreads;          // m, per ion
    std::vector<double> standard_errors;  // m, one sigma of each estimate
};

// Per-ion thermal spreads by sampling mode amplitudes from their Gaussian
// marginals and projecting onto ion coordinates.
MonteCarloSpreads spreads_by_sampling(const TrapConfig& config,
                                      const ChainSolution& solution,
                                      double temperature, int draws,
                                      uint64_t seed);

} // namespace ioncavity::checks
