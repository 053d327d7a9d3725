#include "ioncavity/fit.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "ioncavity/chain.hpp"
#include "ioncavity/constants.hpp"
#include "ioncavity/errors.hpp"
#include "ioncavity/linalg.hpp"

namespace ioncavity {

namespace {

constexpr double kGoldenRatioConjugate = 0.6180339887498949;

// Minimises a 1-D function by golden-section search on [lo, hi].
double golden_minimise(const std::function<double(double)>& f, double lo,
                       double hi, double tolerance) {
    double a = lo;
    double b = hi;
    double x1 = b - kGoldenRatioConjugate * (b - a);
    double x2 = a + kGoldenRatioConjugate * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int iter = 0; iter < 200 && (b - a) > tolerance; ++iter) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGoldenRatioConjugate * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGoldenRatioConjugate * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

struct LinearSinusoid {
    double c0 = 0.0;  // constant term
    double c1 = 0.0;  // cos coefficient
    double c2 = 0.0;  // sin coefficient
    double weighted_ssr = 0.0;
};

// Weighted least squares of counts against {1, cos(w x), sin(w x)}.
LinearSinusoid solve_sinusoid(const std::vector<double>& x,
                              const std::vector<long long>& y,
                              const std::vector<double>& weights, double omega) {
    SquareMatrix normal(3);
    std::vector<double> rhs(3, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double basis[3] = {1.0, std::cos(omega * x[i]),
                                 std::sin(omega * x[i])};
        const double w = weights[i];
        const double yi = static_cast<double>(y[i]);
        for (int r = 0; r < 3; ++r) {
            rhs[static_cast<std::size_t>(r)] += w * basis[r] * yi;
            for (int c = 0; c < 3; ++c) {
                normal(r, c) += w * basis[r] * basis[c];
            }
        }
    }
    const std::vector<double> coeff = solve_linear(normal, rhs);
    LinearSinusoid fit;
    fit.c0 = coeff[0];
    fit.c1 = coeff[1];
    fit.c2 = coeff[2];
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double model = fit.c0 + fit.c1 * std::cos(omega * x[i]) +
                             fit.c2 * std::sin(omega * x[i]);
        const double r = static_cast<double>(y[i]) - model;
        fit.weighted_ssr += weights[i] * r * r;
    }
    return fit;
}

// Inverse of a small symmetric matrix via column-by-column solves.
SquareMatrix invert(const SquareMatrix& a) {
    const int n = a.size();
    SquareMatrix inv(n);
    for (int c = 0; c < n; ++c) {
        std::vector<double> unit(static_cast<std::size_t>(n), 0.0);
        unit[static_cast<std::size_t>(c)] = 1.0;
        const std::vector<double> column = solve_linear(a, unit);
        for (int r = 0; r < n; ++r) {
            inv(r, c) = column[static_cast<std::size_t>(r)];
        }
    }
    return inv;
}

} // namespace

ScanFit fit_scan(const ScanTrace& trace) {
    const std::size_t n = trace.displacements.size();
    if (n < 8) {
        throw std::invalid_argument("scan fit needs at least 8 points");
    }
    if (trace.counts.size() != n) {
        throw std::invalid_argument("displacement and count lists differ in length");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(trace.displacements[i] > trace.displacements[i - 1])) {
            throw std::invalid_argument("displacements must be strictly ascending");
        }
    }
    const double span = trace.displacements.back() - trace.displacements.front();

    std::vector<double> weights(n);
    double mean_counts = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        weights[i] = 1.0 / static_cast<double>(std::max<long long>(trace.counts[i], 1));
        mean_counts += static_cast<double>(trace.counts[i]);
    }
    mean_counts /= static_cast<double>(n);

    // Fringe-frequency seed: dominant discrete Fourier component of the
    // mean-subtracted counts.
    std::size_t best_bin = 1;
    double best_power = -1.0;
    for (std::size_t m = 1; m <= n / 2; ++m) {
        std::complex<double> sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double angle = constants::two_pi * static_cast<double>(m) *
                                 static_cast<double>(i) / static_cast<double>(n);
            sum += (static_cast<double>(trace.counts[i]) - mean_counts) *
                   std::polar(1.0, -angle);
        }
        const double power = std::norm(sum);
        if (power > best_power) {
            best_power = power;
            best_bin = m;
        }
    }

    const double bin_omega = constants::two_pi / (span * static_cast<double>(n) /
                                                  static_cast<double>(n - 1));
    const auto objective = [&](double omega) {
        return solve_sinusoid(trace.displacements, trace.counts, weights, omega)
            .weighted_ssr;
    };
    const double omega_seed = bin_omega * static_cast<double>(best_bin);
    double omega_lo = std::max(0.5 * bin_omega,
                               omega_seed - bin_omega);
    double omega_hi = omega_seed + bin_omega;

    // Coarse profile over the bracket, then golden refinement around the
    // best grid cell.
    constexpr int kGridPoints = 129;
    double best_omega = omega_seed;
    double best_value = objective(omega_seed);
    for (int i = 0; i < kGridPoints; ++i) {
        const double omega = omega_lo + (omega_hi - omega_lo) * i /
                                            static_cast<double>(kGridPoints - 1);
        const double value = objective(omega);
        if (value < best_value) {
            best_value = value;
            best_omega = omega;
        }
    }
    const double cell = (omega_hi - omega_lo) / static_cast<double>(kGridPoints - 1);
    const double omega = golden_minimise(
        objective, std::max(0.25 * bin_omega, best_omega - cell),
        best_omega + cell, 1e-13 * omega_seed);

    const LinearSinusoid lin =
        solve_sinusoid(trace.displacements, trace.counts, weights, omega);
    if (!std::isfinite(lin.c0) || !(lin.c0 > 0.0)) {
        throw FitError("sinusoid fit has a non-positive mean level");
    }
    const double amplitude = std::hypot(lin.c1, lin.c2);
    const double raw_visibility = amplitude / lin.c0;
    if (raw_visibility > 1.25) {
        std::ostringstream message;
        message << "fitted contrast " << raw_visibility
                << " exceeds 1; the trace is not a positive fringe pattern";
        throw FitError(message.str());
    }

    // Poisson-weighted parameter covariance over (c0, c1, c2, omega).
    SquareMatrix info(4);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = std::cos(omega * trace.displacements[i]);
        const double s = std::sin(omega * trace.displacements[i]);
        const double jac[4] = {1.0, c, s,
                               trace.displacements[i] * (-lin.c1 * s + lin.c2 * c)};
        for (int r = 0; r < 4; ++r) {
            for (int cidx = 0; cidx < 4; ++cidx) {
                info(r, cidx) += weights[i] * jac[r] * jac[cidx];
            }
        }
    }
    SquareMatrix covariance(4);
    try {
        covariance = invert(info);
    } catch (const NumericError&) {
        throw FitError("singular information matrix in sinusoid fit");
    }

    ScanFit fit;
    fit.offset = lin.c0;
    fit.amplitude = amplitude;
    fit.visibility = std::clamp(raw_visibility, 0.0, 1.0);
    fit.phase = std::atan2(-lin.c2, lin.c1);
    fit.period = constants::two_pi / omega;

    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double model =
            lin.c0 + lin.c1 * std::cos(omega * trace.displacements[i]) +
            lin.c2 * std::sin(omega * trace.displacements[i]);
        const double r = static_cast<double>(trace.counts[i]) - model;
        ssr += r * r;
    }
    fit.residual_rms = std::sqrt(ssr / static_cast<double>(n));

    // Delta method for sigma_V; the amplitude gradient handles the r -> 0
    // limit by falling back to the larger quadrature component.
    const double r = amplitude;
    double grad[4];
    if (r > 1e-12 * lin.c0) {
        grad[0] = -r / (lin.c0 * lin.c0);
        grad[1] = lin.c1 / (r * lin.c0);
        grad[2] = lin.c2 / (r * lin.c0);
        grad[3] = 0.0;
    } else {
        grad[0] = 0.0;
        grad[1] = 1.0 / lin.c0;
        grad[2] = 1.0 / lin.c0;
        grad[3] = 0.0;
    }
    double var_v = 0.0;
    double var_r = 0.0;
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            var_v += grad[a] * covariance(a, b) * grad[b];
        }
    }
    if (r > 1e-12 * lin.c0) {
        const double gr[2] = {lin.c1 / r, lin.c2 / r};
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                var_r += gr[a] * covariance(a + 1, b + 1) * gr[b];
            }
        }
    } else {
        var_r = covariance(1, 1) + covariance(2, 2);
    }
    fit.visibility_uncertainty = std::sqrt(std::max(var_v, 0.0));
    fit.low_significance = r <= 2.0 * std::sqrt(std::max(var_r, 0.0));
    return fit;
}

namespace {

// Frequency- and temperature-independent chain data reused across the
// thousands of objective evaluations of a curve fit: dimensionless
// positions u_i, plus s_i = sum_j U_ij^2 / mu_j, which turns the per-ion
// thermal variance into dz_i^2 = (2 kB T / (m w^2)) * s_i.
struct ScaledChain {
    std::vector<double> u;
    std::vector<double> spread_factors;
};

ScaledChain make_scaled_chain(const TrapConfig& config) {
    constexpr double kReferenceFrequency = constants::two_pi * 500e3;
    const ChainSolution solution = solve_chain(config, kReferenceFrequency);
    ScaledChain chain;
    const std::size_t n = static_cast<std::size_t>(solution.num_ions);
    chain.u.resize(n);
    chain.spread_factors.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        chain.u[i] = solution.positions[i] / solution.length_scale;
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double component =
                solution.mode_component(static_cast<int>(i), static_cast<int>(j));
            s += component * component / solution.mode_eigenvalues[j];
        }
        chain.spread_factors[i] = s;
    }
    return chain;
}

double model_visibility(const TrapConfig& config, const ScaledChain& chain,
                        double com_frequency, double temperature) {
    const double scale = length_scale(config, com_frequency);
    const double k = config.wavenumber();
    const double base_variance = 2.0 * constants::boltzmann * temperature /
                                 (config.ion_mass * com_frequency * com_frequency);
    std::complex<double> resultant = 0.0;
    for (std::size_t i = 0; i < chain.u.size(); ++i) {
        const double variance = base_variance * chain.spread_factors[i];
        const double weight = std::exp(-k * k * variance);
        resultant += weight * std::polar(1.0, 2.0 * k * scale * chain.u[i]);
    }
    return std::abs(resultant) / static_cast<double>(chain.u.size());
}

constexpr double kFailedObjective = 1e12;

struct SimplexResult {
    double temperature = 0.0;
    double offset = 0.0;
    double objective = kFailedObjective;
};

// Standard Nelder-Mead on two scaled parameters. `scale` maps the
// dimensionless simplex coordinates back to (T, offset).
SimplexResult nelder_mead(const std::function<double(double, double)>& objective,
                          double t0, double o0, double t_step, double o_step) {
    struct Vertex {
        double t, o, value;
    };
    std::array<Vertex, 3> simplex{{{t0, o0, objective(t0, o0)},
                                   {t0 + t_step, o0, objective(t0 + t_step, o0)},
                                   {t0, o0 + o_step, objective(t0, o0 + o_step)}}};
    const auto order = [&] {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Vertex& a, const Vertex& b) { return a.value < b.value; });
    };
    order();
    for (int iter = 0; iter < 500; ++iter) {
        if (simplex[2].value - simplex[0].value <=
            1e-10 * (1.0 + std::abs(simplex[0].value))) {
            break;
        }
        const double ct = 0.5 * (simplex[0].t + simplex[1].t);
        const double co = 0.5 * (simplex[0].o + simplex[1].o);
        const double rt = ct + (ct - simplex[2].t);
        const double ro = co + (co - simplex[2].o);
        const double reflected = objective(rt, ro);
        if (reflected < simplex[0].value) {
            const double et = ct + 2.0 * (ct - simplex[2].t);
            const double eo = co + 2.0 * (co - simplex[2].o);
            const double expanded = objective(et, eo);
            simplex[2] = expanded < reflected ? Vertex{et, eo, expanded}
                                              : Vertex{rt, ro, reflected};
        } else if (reflected < simplex[1].value) {
            simplex[2] = {rt, ro, reflected};
        } else {
            const double kt = ct + 0.5 * (simplex[2].t - ct);
            const double ko = co + 0.5 * (simplex[2].o - co);
            const double contracted = objective(kt, ko);
            if (contracted < simplex[2].value) {
                simplex[2] = {kt, ko, contracted};
            } else {
                for (int i = 1; i < 3; ++i) {
                    simplex[i].t = simplex[0].t + 0.5 * (simplex[i].t - simplex[0].t);
                    simplex[i].o = simplex[0].o + 0.5 * (simplex[i].o - simplex[0].o);
                    simplex[i].value = objective(simplex[i].t, simplex[i].o);
                }
            }
        }
        order();
    }
    return {simplex[0].t, simplex[0].o, simplex[0].value};
}

} // namespace

CurveFit fit_visibility_curve(const VisibilityCurve& data,
                              const TrapConfig& config, double initial_T) {
    if (data.size() < 3) {
        throw FitError("curve fit needs at least 3 data points");
    }
    if (!(initial_T > 0.0)) {
        throw std::invalid_argument("initial temperature must be positive");
    }
    validate(config);

    bool unit_weights = false;
    for (const VisibilityPoint& point : data) {
        if (!(point.uncertainty > 0.0)) {
            unit_weights = true;
        }
        if (!(point.com_frequency > 0.0)) {
            throw FitError("curve fit requires positive frequencies");
        }
    }

    const ScaledChain chain = make_scaled_chain(config);
    const double t_ref = config.doppler_temperature;
    const double o_ref = constants::two_pi * 1e3;  // 1 kHz in rad/s

    // Scaled parameters: x = T / T_Doppler, y = offset / (2 pi kHz).
    const auto chi_squared = [&](double x, double y) {
        const double temperature = x * t_ref;
        const double offset = y * o_ref;
        if (!(temperature > 1e-3 * t_ref)) {
            return kFailedObjective * (1.0 + std::abs(x));
        }
        double total = 0.0;
        for (const VisibilityPoint& point : data) {
            const double frequency = point.com_frequency + offset;
            if (!(frequency > 0.0)) {
                return kFailedObjective;
            }
            const double model =
                model_visibility(config, chain, frequency, temperature);
            const double sigma = unit_weights ? 1.0 : point.uncertainty;
            const double r = (model - point.visibility) / sigma;
            total += r * r;
        }
        return std::isfinite(total) ? total : kFailedObjective;
    };

    const double start_scales[3] = {0.5, 1.0, 2.0};
    const double start_offsets[3] = {-1.5, 0.0, 1.5};
    SimplexResult best;
    bool any_success = false;
    std::ostringstream failures;
    for (const double ts : start_scales) {
        for (const double os : start_offsets) {
            const SimplexResult result =
                nelder_mead(chi_squared, ts * initial_T / t_ref, os, 0.25, 0.5);
            if (result.objective >= 1e11 || !std::isfinite(result.objective)) {
                failures << " start(T=" << ts * initial_T / t_ref << " T_D, off=" << os
                         << " kHz) -> " << result.objective;
                continue;
            }
            any_success = true;
            const bool better =
                result.objective < best.objective -
                                       1e-12 * (1.0 + std::abs(best.objective)) ||
                (std::abs(result.objective - best.objective) <=
                     1e-12 * (1.0 + std::abs(best.objective)) &&
                 result.temperature < best.temperature);
            if (better) {
                best = result;
            }
        }
    }
    if (!any_success) {
        throw FitError("all curve-fit starts failed:" + failures.str());
    }

    CurveFit fit;
    fit.temperature = best.temperature * t_ref;
    fit.frequency_offset = best.offset * o_ref;
    fit.chi_squared = best.objective;
    fit.dof = static_cast<int>(data.size()) - 2;

    // Covariance from the quadratic expansion: cov = 2 H^-1 with H the
    // central-difference Hessian of chi^2 at the optimum.
    const double ht = 1e-4;           // in units of T_Doppler
    const double ho = 1e-3;           // in units of 2 pi kHz, i.e. 1 Hz
    const double t = best.temperature;
    const double o = best.offset;
    const double f0 = best.objective;
    const double h_tt =
        (chi_squared(t + ht, o) - 2.0 * f0 + chi_squared(t - ht, o)) / (ht * ht);
    const double h_oo =
        (chi_squared(t, o + ho) - 2.0 * f0 + chi_squared(t, o - ho)) / (ho * ho);
    const double h_to = (chi_squared(t + ht, o + ho) - chi_squared(t + ht, o - ho) -
                         chi_squared(t - ht, o + ho) + chi_squared(t - ht, o - ho)) /
                        (4.0 * ht * ho);
    const double det = h_tt * h_oo - h_to * h_to;
    if (!(h_tt > 0.0 && det > 0.0)) {
        throw FitError("degenerate curvature at the fitted optimum");
    }
    double scale = 2.0;
    if (unit_weights && fit.dof > 0) {
        scale *= fit.chi_squared / static_cast<double>(fit.dof);
    }
    const double cov_tt = scale * h_oo / det;
    const double cov_oo = scale * h_tt / det;
    const double cov_to = -scale * h_to / det;
    fit.covariance[0][0] = cov_tt * t_ref * t_ref;
    fit.covariance[0][1] = cov_to * t_ref * o_ref;
    fit.covariance[1][0] = fit.covariance[0][1];
    fit.covariance[1][1] = cov_oo * o_ref * o_ref;
    return fit;
}

} // namespace ioncavity
