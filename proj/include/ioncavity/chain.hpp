#pragma once

#include <vector>

#include "ioncavity/config.hpp"

namespace ioncavity {

// Equilibrium structure and axial normal modes of a linear Coulomb chain in
// a harmonic trap. Positions are stored in metres; the dimensionless
// counterparts are positions[i] / length_scale.
//
// The mode matrix U is orthogonal with columns ordered by ascending
// eigenvalue; U(i,j) is the participation of ion i in mode j. The first
// mode is always the centre-of-mass mode: eigenvalue 1, uniform column.
struct ChainSolution {
    int num_ions = 0;
    double com_frequency = 0.0;  // rad/s, secular frequency of the COM mode
    double length_scale = 0.0;   // m
    std::vector<double> positions;         // m, strictly ascending
    std::vector<double> mode_eigenvalues;  // dimensionless mu_j, ascending
    std::vector<double> mode_matrix;       // N x N, row-major

    double mode_component(int ion, int mode) const {
        return mode_matrix[static_cast<size_t>(ion) * num_ions + mode];
    }
    // omega_j = omega_sec * sqrt(mu_j)
    double mode_frequency(int mode) const;
    bool has_modes() const { return !mode_eigenvalues.empty(); }
};

// Natural unit of inter-ion distance, (q^2 / (4 pi eps0 m omega^2))^(1/3).
// Throws std::domain_error for a non-positive frequency.
double length_scale(const TrapConfig& config, double com_frequency);

// Solves the axial force balance for N ions by damped Newton iteration.
// The returned solution has positions populated; call normal_modes() (or
// solve_chain) for the eigenstructure. Dimensionless residual below 1e-12
// on success, NumericError after the iteration cap otherwise.
ChainSolution equilibrium_positions(const TrapConfig& config, double com_frequency);

// Populates mode eigenvalues and the orthogonal mode matrix by
// diagonalising the dimensionless Hessian of the chain potential.
// Throws NumericError when the supplied positions do not satisfy the
// force balance, since the Hessian is only meaningful at equilibrium.
ChainSolution normal_modes(ChainSolution solution);

// equilibrium_positions followed by normal_modes.
ChainSolution solve_chain(const TrapConfig& config, double com_frequency);

// Largest residual of the dimensionless force-balance equations.
double force_balance_residual(const ChainSolution& solution);

// Advisory check against the empirical zigzag threshold
// (omega_axial / omega_radial)^2 < 2.53 N^(-1.73). Returns false when the
// chain is predicted to buckle; always true if no radial frequency is set.
bool chain_expected_linear(const TrapConfig& config, double com_frequency);

} // namespace ioncavity
