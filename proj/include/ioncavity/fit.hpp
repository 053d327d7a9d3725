#pragma once

#include <array>

#include "ioncavity/config.hpp"
#include "ioncavity/coupling.hpp"
#include "ioncavity/scan.hpp"

namespace ioncavity {

// Sinusoid fitted to a standing-wave scan. The model is
//   counts(x) = offset + amplitude * cos(2*pi*x/period + phase)
// so visibility = amplitude / offset is the (max-min)/(max+min) contrast
// of the fitted curve and is invariant under count rescaling.
struct ScanFit {
    double offset = 0.0;      // counts, mean level
    double amplitude = 0.0;   // counts, >= 0
    double visibility = 0.0;  // in [0, 1]
    double phase = 0.0;       // rad, in (-pi, pi]
    double period = 0.0;      // m
    double residual_rms = 0.0;           // counts
    double visibility_uncertainty = 0.0; // one sigma, Poisson-weighted
    bool low_significance = false;       // amplitude within 2 sigma of zero
};

// Least-squares sinusoid fit with Poisson weights (variance = counts). The
// fringe frequency is seeded from the dominant discrete Fourier component
// and refined by a profiled line search; the linear parameters are solved
// exactly at each candidate frequency. Throws FitError when the fit is
// unbounded or the trace is unusable, std::invalid_argument on malformed
// input (< 8 points, non-ascending displacements).
ScanFit fit_scan(const ScanTrace& trace);

// Temperature and frequency-axis offset fitted to a visibility curve.
// covariance is ordered (temperature, frequency_offset) with units K^2,
// K*rad/s, (rad/s)^2.
struct CurveFit {
    double temperature = 0.0;       // K
    double frequency_offset = 0.0;  // rad/s, model evaluated at nu + offset
    std::array<std::array<double, 2>, 2> covariance{};
    double chi_squared = 0.0;
    int dof = 0;
};

// Minimises sum(((V_model(nu_i + offset, T) - V_i) / sigma_i)^2) over
// (T, offset) with Nelder-Mead simplex runs from a 3x3 grid of starts
// around initial_T (objective tolerance 1e-10, ties resolved toward lower
// temperature). If any sigma_i is non-positive the fit falls back to unit
// weights and scales the covariance by chi^2/dof. The covariance comes
// from the central-difference Hessian of the objective at the optimum.
// Chain geometry is solved once in dimensionless form and rescaled per
// frequency, so objective evaluations stay cheap. Throws FitError when
// every start fails or the optimum has a degenerate Hessian.
CurveFit fit_visibility_curve(const VisibilityCurve& data,
                              const TrapConfig& config, double initial_T);

} // namespace ioncavity
