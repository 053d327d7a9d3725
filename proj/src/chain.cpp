#include "ioncavity/chain.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ioncavity/errors.hpp"
#include "ioncavity/linalg.hpp"

namespace ioncavity {

namespace {

constexpr double kResidualTol = 1e-12;
constexpr int kMaxNewtonIterations = 200;

// Dimensionless axial force balance: the trap pulls each ion toward the
// origin while every other ion pushes it away,
//   F_i(u) = u_i - sum_{j<i} (u_i-u_j)^-2 + sum_{j>i} (u_i-u_j)^-2.
std::vector<double> force_balance(const std::vector<double>& u) {
    const int n = static_cast<int>(u.size());
    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) {
        double fi = u[i];
        for (int j = 0; j < i; ++j) {
            const double d = u[i] - u[j];
            fi -= 1.0 / (d * d);
        }
        for (int j = i + 1; j < n; ++j) {
            const double d = u[i] - u[j];
            fi += 1.0 / (d * d);
        }
        f[i] = fi;
    }
    return f;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Hessian of the chain potential at u; also the Jacobian of force_balance.
SquareMatrix chain_hessian(const std::vector<double>& u) {
    const int n = static_cast<int>(u.size());
    SquareMatrix a(n);
    for (int i = 0; i < n; ++i) {
        double diag = 1.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double inv3 = 1.0 / std::pow(std::abs(u[i] - u[j]), 3);
            diag += 2.0 * inv3;
            a(i, j) = -2.0 * inv3;
        }
        a(i, i) = diag;
    }
    return a;
}

} // namespace

double ChainSolution::mode_frequency(int mode) const {
    return com_frequency * std::sqrt(mode_eigenvalues[mode]);
}

double length_scale(const TrapConfig& config, double com_frequency) {
    if (!(com_frequency > 0.0)) {
        throw std::domain_error("com_frequency must be positive");
    }
    const double q2 = config.charge * config.charge;
    const double denom = 4.0 * constants::pi * constants::vacuum_permittivity *
                         config.ion_mass * com_frequency * com_frequency;
    return std::cbrt(q2 / denom);
}

ChainSolution equilibrium_positions(const TrapConfig& config, double com_frequency) {
    validate(config);
    const int n = config.num_ions;
    const double scale = length_scale(config, com_frequency);

    ChainSolution solution;
    solution.num_ions = n;
    solution.com_frequency = com_frequency;
    solution.length_scale = scale;

    if (n == 1) {
        solution.positions = {0.0};
        return solution;
    }

    // Uniform-density initial guess: equally spaced over +-0.48 N^0.56.
    std::vector<double> u(n);
    const double half_span = 0.48 * std::pow(static_cast<double>(n), 0.56);
    for (int i = 0; i < n; ++i) {
        u[i] = -half_span + 2.0 * half_span * i / (n - 1);
    }

    std::vector<double> f = force_balance(u);
    double residual = max_abs(f);
    for (int iter = 0; iter < kMaxNewtonIterations; ++iter) {
        if (residual < kResidualTol) break;
        const std::vector<double> step = solve_linear(chain_hessian(u), f);

        // Backtrack by step halving whenever the residual would grow; also
        // rejects steps that would reorder ions.
        double damping = 1.0;
        std::vector<double> trial(n);
        double trial_residual = residual;
        for (int halvings = 0; halvings < 60; ++halvings) {
            bool ordered = true;
            for (int i = 0; i < n; ++i) {
                trial[i] = u[i] - damping * step[i];
                if (i > 0 && trial[i] <= trial[i - 1]) ordered = false;
            }
            if (ordered) {
                trial_residual = max_abs(force_balance(trial));
                if (trial_residual < residual) break;
            }
            damping *= 0.5;
        }
        u = trial;
        f = force_balance(u);
        residual = max_abs(f);
    }
    if (residual >= kResidualTol) {
        throw NumericError("chain equilibrium did not converge; residual " +
                           std::to_string(residual) + " for N=" + std::to_string(n));
    }

    // The potential is even in u, so the exact solution is antisymmetric;
    // symmetrising removes the last rounding bias without moving the
    // residual above tolerance.
    for (int i = 0; i < n / 2; ++i) {
        const double v = 0.5 * (u[i] - u[n - 1 - i]);
        u[i] = v;
        u[n - 1 - i] = -v;
    }
    if (n % 2 == 1) u[n / 2] = 0.0;

    solution.positions.resize(n);
    for (int i = 0; i < n; ++i) solution.positions[i] = u[i] * scale;
    return solution;
}

ChainSolution normal_modes(ChainSolution solution) {
    const int n = solution.num_ions;
    if (static_cast<int>(solution.positions.size()) != n || n < 1) {
        throw std::invalid_argument("normal_modes requires populated positions");
    }
    if (force_balance_residual(solution) > 1e-9) {
        throw NumericError(
            "normal_modes requires converged equilibrium positions");
    }

    if (n == 1) {
        solution.mode_eigenvalues = {1.0};
        solution.mode_matrix = {1.0};
        return solution;
    }

    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) u[i] = solution.positions[i] / solution.length_scale;

    const EigenDecomposition eig = jacobi_eigensolve(chain_hessian(u));
    solution.mode_eigenvalues = eig.values;
    solution.mode_matrix.resize(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            solution.mode_matrix[static_cast<size_t>(i) * n + j] = eig.vectors(i, j);
    return solution;
}

ChainSolution solve_chain(const TrapConfig& config, double com_frequency) {
    return normal_modes(equilibrium_positions(config, com_frequency));
}

double force_balance_residual(const ChainSolution& solution) {
    std::vector<double> u(solution.positions.size());
    for (size_t i = 0; i < u.size(); ++i) {
        u[i] = solution.positions[i] / solution.length_scale;
    }
    return max_abs(force_balance(u));
}

bool chain_expected_linear(const TrapConfig& config, double com_frequency) {
    if (!(config.radial_frequency > 0.0) || config.num_ions < 3) return true;
    const double ratio = com_frequency / config.radial_frequency;
    const double threshold =
        2.53 * std::pow(static_cast<double>(config.num_ions), -1.73);
    return ratio * ratio < threshold;
}

} // namespace ioncavity
