#include "ioncavity/oracles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ioncavity/constants.hpp"
#include "ioncavity/errors.hpp"
#include "ioncavity/rng.hpp"
#include "ioncavity/thermal.hpp"

namespace ioncavity::checks {

namespace {

// Refines a grid extremum by fitting a parabola through the three samples
// around index i (periodic). Returns the interpolated extreme value.
double parabolic_extremum(const std::vector<double>& values, std::size_t i) {
    const std::size_t n = values.size();
    const double left = values[(i + n - 1) % n];
    const double centre = values[i];
    const double right = values[(i + 1) % n];
    const double denom = left - 2.0 * centre + right;
    if (denom == 0.0) {
        return centre;
    }
    const double shift = 0.5 * (left - right) / denom;
    return centre - 0.25 * (left - right) * shift;
}

double chain_energy(const std::vector<double>& u) {
    double energy = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        energy += 0.5 * u[i] * u[i];
        for (std::size_t j = i + 1; j < u.size(); ++j) {
            energy += 1.0 / std::abs(u[i] - u[j]);
        }
    }
    return energy;
}

void chain_gradient(const std::vector<double>& u, std::vector<double>& grad) {
    const std::size_t n = u.size();
    for (std::size_t i = 0; i < n; ++i) {
        grad[i] = u[i];
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = u[i] - u[j];
            grad[i] -= (d > 0.0 ? 1.0 : -1.0) / (d * d);
        }
    }
}

} // namespace

double visibility_by_phase_scan(const CouplingModel& model, int samples) {
    if (samples < 16) {
        throw std::invalid_argument("phase scan needs at least 16 samples");
    }
    std::vector<double> values(static_cast<std::size_t>(samples));
    std::size_t arg_max = 0;
    std::size_t arg_min = 0;
    for (int s = 0; s < samples; ++s) {
        const double phase = constants::two_pi * s / static_cast<double>(samples);
        values[static_cast<std::size_t>(s)] = emission_at_phase(model, phase);
        if (values[static_cast<std::size_t>(s)] > values[arg_max]) {
            arg_max = static_cast<std::size_t>(s);
        }
        if (values[static_cast<std::size_t>(s)] < values[arg_min]) {
            arg_min = static_cast<std::size_t>(s);
        }
    }
    const double w_max = parabolic_extremum(values, arg_max);
    const double w_min = parabolic_extremum(values, arg_min);
    if (!(w_max + w_min > 0.0)) {
        throw NumericError("emission profile not positive over the phase scan");
    }
    return (w_max - w_min) / (w_max + w_min);
}

std::vector<double> equilibrium_by_descent(int num_ions, double tolerance) {
    if (num_ions < 1) {
        throw std::invalid_argument("ion count must be positive");
    }
    const std::size_t n = static_cast<std::size_t>(num_ions);
    if (n == 1) {
        return {0.0};
    }
    std::vector<double> u(n);
    const double half_extent = 0.48 * std::pow(static_cast<double>(n), 0.56);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = -half_extent +
               2.0 * half_extent * static_cast<double>(i) / static_cast<double>(n - 1);
    }

    std::vector<double> grad(n);
    std::vector<double> trial(n);

    // Phase 1: Armijo-backtracked descent takes the spread-out start into
    // the basin. The sufficient-decrease test compares total energies, so
    // it cannot certify progress once decrements shrink below one ulp of
    // the energy; we therefore only drive the gradient to a coarse level.
    const double coarse = std::max(tolerance, 1e-6);
    double step = 0.1;
    double energy = chain_energy(u);
    bool coarse_reached = false;
    for (int iter = 0; iter < 20000 && !coarse_reached; ++iter) {
        chain_gradient(u, grad);
        double grad_norm = 0.0;
        for (const double g : grad) {
            grad_norm = std::max(grad_norm, std::abs(g));
        }
        if (grad_norm <= coarse) {
            coarse_reached = true;
            break;
        }
        double grad_sq = 0.0;
        for (const double g : grad) {
            grad_sq += g * g;
        }
        bool moved = false;
        for (int backtrack = 0; backtrack < 60; ++backtrack) {
            for (std::size_t i = 0; i < n; ++i) {
                trial[i] = u[i] - step * grad[i];
            }
            bool ordered = true;
            for (std::size_t i = 1; i < n; ++i) {
                if (!(trial[i] > trial[i - 1])) {
                    ordered = false;
                    break;
                }
            }
            if (ordered) {
                const double trial_energy = chain_energy(trial);
                if (trial_energy <= energy - 1e-4 * step * grad_sq) {
                    u = trial;
                    energy = trial_energy;
                    moved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!moved) {
            throw NumericError("gradient descent stalled before convergence");
        }
        step *= 1.5;
    }
    if (!coarse_reached) {
        throw NumericError("gradient descent hit the iteration cap");
    }
    if (coarse <= tolerance) {
        return u;
    }

    // Phase 2: plain fixed-step gradient iteration. With no energy
    // comparison there is nothing for rounding to stall, and the map
    // contracts for steps below 2/lambda_max of the chain Hessian; the
    // halving guard keeps it stable for long chains.
    double alpha = 0.02;
    double previous_norm = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 400000; ++iter) {
        chain_gradient(u, grad);
        double grad_norm = 0.0;
        for (const double g : grad) {
            grad_norm = std::max(grad_norm, std::abs(g));
        }
        if (grad_norm <= tolerance) {
            return u;
        }
        if (grad_norm > previous_norm) {
            alpha *= 0.5;
        }
        previous_norm = grad_norm;
        for (std::size_t i = 0; i < n; ++i) {
            u[i] -= alpha * grad[i];
        }
    }
    throw NumericError("gradient descent hit the iteration cap");
}

MonteCarloSpreads spreads_by_sampling(const TrapConfig& config,
                                      const ChainSolution& solution,
                                      double temperature, int draws,
                                      uint64_t seed) {
    if (draws < 100) {
        throw std::invalid_argument("need at least 100 draws");
    }
    if (!solution.has_modes()) {
        throw std::invalid_argument("solution lacks normal modes");
    }
    const ThermalState thermal = thermal_spreads(config, solution, temperature);
    const std::size_t n = static_cast<std::size_t>(solution.num_ions);

    std::vector<double> sum_sq(n, 0.0);
    std::vector<double> amplitudes(n);
    SplitMix64 rng(seed);
    for (int d = 0; d < draws; ++d) {
        for (std::size_t j = 0; j < n; ++j) {
            amplitudes[j] = thermal.mode_spreads[j] * rng.normal();
        }
        for (std::size_t i = 0; i < n; ++i) {
            double z = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                z += solution.mode_component(static_cast<int>(i),
                                             static_cast<int>(j)) *
                     amplitudes[j];
            }
            sum_sq[i] += z * z;
        }
    }

    MonteCarloSpreads result;
    result.spreads.resize(n);
    result.standard_errors.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double spread = std::sqrt(sum_sq[i] / static_cast<double>(draws));
        result.spreads[i] = spread;
        // var(z^2) = 2 sigma^4 for a Gaussian, so the rms estimate carries
        // a standard error of sigma / sqrt(2 draws).
        result.standard_errors[i] =
            spread / std::sqrt(2.0 * static_cast<double>(draws));
    }
    return result;
}

} // namespace ioncavity::checks
