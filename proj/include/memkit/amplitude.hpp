// Copyright (c) 2026 The memkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "memkit/common.hpp"
#include "memkit/quadrature.hpp"
#include "memkit/spectral.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace memkit {

enum class AmplitudeMethod { ClosedForm, SpectralIntegral, Volterra };

/// Sampled decoherence amplitude c(t) on a uniform grid starting at 0.
struct AmplitudeTrace {
    std::vector<double> grid;
    std::vector<cplx> values;
    AmplitudeMethod method = AmplitudeMethod::ClosedForm;
    double step = 0.0;
    /// Set when the empirical step-doubling error estimate exceeds 1e-3.
    bool coarse_step_warning = false;

    double t_max() const { return grid.empty() ? 0.0 : grid.back(); }
    /// Checks c(0) = 1, |c| <= 1 + 1e-9 and a strictly increasing grid.
    void validate() const;
};

/// Closed-form Lorentzian amplitude
///   c(t) = e^{-lambda t/2} [cosh(d t/2) + (lambda/d) sinh(d t/2)],
///   d = sqrt(lambda^2 - 2 gamma0 lambda),
/// evaluated with complex d (oscillatory for R = gamma0/lambda > 1/2) and
/// by its series limit when d t is small.
cplx lorentzian_amplitude(double gamma0, double lambda, double t);

/// Ohmic amplitude from the spectral decomposition
///   c(t) = e^{i w0 t} { Z e^{-i w' t}
///          + int_0^inf dw J(w) e^{-i w t} /
///            ([w - w0 - Sigma(w)]^2 + pi^2 J(w)^2) },
/// with the bound-state term present iff alpha w_c > w0. The branch-cut
/// integrand is cached on a resonance-refined quadrature mesh at
/// construction; `t_support` bounds the times the mesh must resolve.
class OhmicAmplitude {
public:
    OhmicAmplitude(const SpectralDensity& sd, double t_support);

    /// Raw (unnormalized) amplitude; |c(0) - 1| is the quadrature defect.
    cplx operator()(double t) const;

    /// Amplitude sampled on {0, step, ..., ~t_max}, normalized so that
    /// c(0) = 1 exactly. Parallel version uses the phase-recurrence
    /// batch kernel; serial is the direct reference.
    AmplitudeTrace trace(double t_max, double step) const;
    AmplitudeTrace trace_serial(double t_max, double step) const;

    const std::optional<BoundState>& bound() const { return bound_; }
    double sum_rule_defect() const;
    /// Largest phase frequency present in c(t); sets trace step sizes.
    double max_phase_frequency() const;

private:
    AmplitudeTrace trace_impl(double t_max, double step, bool parallel) const;
    cplx pole_and_ir(double t) const;

    SpectralDensity sd_;
    std::optional<BoundState> bound_;
    std::vector<double> node_omega_;
    std::vector<cplx> node_amp_; // quadrature weight times integrand
    double ir_mass_ = 0.0;       // analytic infrared piece (critical coupling)
    double resonance_max_ = 0.0;
    double t_support_ = 0.0;
};

/// One-shot convenience wrapper around OhmicAmplitude.
cplx ohmic_amplitude(const SpectralDensity& sd, double t);

/// Product-integration (trapezoidal kernel weights) predictor-corrector
/// solver for c_dot(t) = -int_0^t f(t - s) c(s) ds on a uniform grid;
/// second order in the step. The parallel version distributes the
/// history convolution, the serial version is the plain reference loop.
AmplitudeTrace volterra_solve(const SpectralDensity& sd, double t_max,
                              double step);
AmplitudeTrace volterra_solve_serial(const SpectralDensity& sd, double t_max,
                                     double step);

/// Time-local rates gamma(t) = -2 Re[c_dot/c], S(t) = -2 Im[c_dot/c] by
/// central differences; samples with |c| < 1e-8 are masked invalid.
struct DecayRates {
    std::vector<double> grid;
    std::vector<double> gamma;
    std::vector<double> s_shift;
    std::vector<std::uint8_t> valid;
};

DecayRates decay_rates(const AmplitudeTrace& trace);

/// Cubic (4-point Lagrange) interpolation; exact at grid nodes. Throws
/// std::domain_error outside [0, t_max].
cplx amplitude_at(const AmplitudeTrace& trace, double t);

/// CSV export/import: columns t, re_c, im_c; '#' header lines record
/// method, parameters and step.
void write_trace_csv(const AmplitudeTrace& trace, std::ostream& out,
                     const std::string& params_comment = "");
AmplitudeTrace read_trace_csv(std::istream& in);

using AmplitudeFn = std::function<cplx(double)>;

/// Amplitude accessor for a spectral model plus the optimization horizon
/// it supports. The accessor is valid on [0, 2 * horizon].
struct AmplitudeModel {
    AmplitudeFn cfun;
    double horizon = 0.0;
    std::optional<AmplitudeTrace> trace;
    std::optional<BoundState> bound;
};

struct ModelOptions {
    double horizon_override = 0.0; // 0 = automatic decay horizon
    double step_override = 0.0;    // 0 = automatic step
    bool parallel = true;
};

/// Route selection: Lorentzian -> closed form, Ohmic -> spectral
/// integral, truncated Lorentzian / tabulated -> Volterra. The automatic
/// horizon is the earliest time after which |c| stays below 1e-4, capped
/// at 50/gamma0 (Lorentzian kinds) or 200/w_c (Ohmic).
AmplitudeModel make_amplitude_model(const SpectralDensity& sd,
                                    const ModelOptions& options = {});

/// Earliest sampled time from which max_{s >= t} |c(s)| < 1e-4; returns
/// `cap` when the tail never decays that far.
double decay_horizon(const AmplitudeFn& cfun, double cap, int samples = 4000);

/// Sample an amplitude callable onto a uniform trace (used to export
/// closed-form amplitudes through the trace machinery).
AmplitudeTrace sample_amplitude(const AmplitudeFn& cfun, double t_max,
                                double step, AmplitudeMethod tag);

} // namespace memkit
