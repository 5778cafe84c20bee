#pragma once

#include <optional>
#include <string>

#include "shf/echo.hpp"

// Inverse problem for the single-modulation echo model: estimate
// (I0, T2, delta_g, delta_e, rho) from a trace with the stretching exponent
// held fixed, report one-sigma uncertainties, and derive the homogeneous
// linewidth from T2.

namespace shf {

struct FitEstimates {
    double I0 = 0.0;
    double T2_us = 0.0;
    double delta_g_kHz = 0.0;
    double delta_e_kHz = 0.0;
    double rho = 0.0;
};

struct FitConfig {
    double x_fixed = 1.5;       // never fitted, only configured
    int max_iterations = 200;   // accepted damped steps
    double tolerance = 1e-10;   // relative cost decrease declaring convergence
    std::optional<FitEstimates> initial;  // default: initial_guess(trace)
};

struct FitResult {
    FitEstimates estimates;  // delta_g >= delta_e by convention
    FitEstimates sigma;      // one-sigma uncertainties, same layout
    double residual_norm = 0.0;  // euclidean norm of intensity residuals
    bool converged = false;      // false => estimates are not usable
    int iterations = 0;
    std::string message;
};

// Trace carries no usable signal (flat or all-zero).
struct NoSignal : InvalidInput {
    using InvalidInput::InvalidInput;
};

// Gauss-Newton normal matrix is numerically singular at the optimum; the
// message names the parameters without leverage (e.g. both deltas when
// rho is consistent with zero).
struct UnidentifiableFit : ComputationError {
    using ComputationError::ComputationError;
};

// Data-driven starting point: I0 from the earliest samples, T2 from the
// log slope of the upper envelope, deltas from the two strongest spectral
// peaks (one peak -> equal deltas), rho from a 1-d profile scan.
FitEstimates initial_guess(const EchoTrace& trace);

// Damped least squares (Levenberg-Marquardt) on intensity residuals with
// uniform weights; positivity and rho in [0,1] enforced by smooth internal
// reparameterizations; uncertainties from the residual-scaled inverse of
// the Gauss-Newton normal matrix at the optimum.
FitResult fit_echo(const EchoTrace& trace, const FitConfig& config = {});

// Homogeneous linewidth 1/(pi T2), returned in kHz for T2 in us.
double linewidth_kHz(double T2_us);

}  // namespace shf
