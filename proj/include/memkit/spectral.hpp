// Copyright (c) 2026 The memkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "memkit/common.hpp"
#include "memkit/special_functions.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace memkit {

enum class SpectralKind { Lorentzian, TruncatedLorentzian, Ohmic, Tabulated };

struct TableSample {
    double omega;
    double j;
};

/// Parametrized environment coupling spectrum J(omega) together with the
/// system transition frequency omega0. Values are immutable after
/// construction and safe to share across threads.
class SpectralDensity {
public:
    static SpectralDensity lorentzian(double gamma0, double lambda,
                                      double omega0);
    static SpectralDensity truncated_lorentzian(double gamma0, double lambda,
                                                double omega0);
    static SpectralDensity ohmic(double alpha, double omega_c, double omega0);
    static SpectralDensity tabulated(std::vector<TableSample> table,
                                     double omega0);

    SpectralKind kind() const { return kind_; }
    double gamma0() const { return gamma0_; }
    double lambda() const { return lambda_; }
    double alpha() const { return alpha_; }
    double omega_c() const { return omega_c_; }
    double omega0() const { return omega0_; }
    /// R = gamma0 / lambda (Lorentzian kinds).
    double ratio_r() const { return gamma0_ / lambda_; }
    const std::vector<TableSample>& table() const { return table_; }

    /// Total spectral weight int J(w) dw; used as the error scale for
    /// kernel quadrature checks.
    double mass() const;

private:
    SpectralDensity() = default;

    SpectralKind kind_ = SpectralKind::Lorentzian;
    double gamma0_ = 0.0;
    double lambda_ = 0.0;
    double alpha_ = 0.0;
    double omega_c_ = 0.0;
    double omega0_ = 0.0;
    std::vector<TableSample> table_;
};

/// J(omega) for the given spectrum. Truncated-Lorentzian vanishes for
/// omega < 0, Ohmic for omega <= 0, Tabulated outside its sample range.
double density_at(const SpectralDensity& sd, double omega);

/// Environment correlation kernel f(tau) = int dw J(w) e^{i (w0 - w) tau}
/// for tau >= 0. The full-line Lorentzian uses the closed form
/// (gamma0 lambda / 2) e^{-lambda tau}; the half-line kinds are evaluated
/// by oscillation-bounded composite Gauss-Legendre panels (plus an
/// analytic tail for the truncated Lorentzian).
cplx correlation_kernel(const SpectralDensity& sd, double tau);

/// Kernel tabulated on the uniform grid tau_k = k * dt, k = 0..n-1.
/// Parallel version shares one quadrature mesh across the grid and
/// advances oscillatory phases by recurrence.
std::vector<cplx> correlation_kernel_grid(const SpectralDensity& sd, double dt,
                                          std::size_t n);
std::vector<cplx> correlation_kernel_grid_serial(const SpectralDensity& sd,
                                                 double dt, std::size_t n);

/// Ohmic level-shift function
/// Sigma(w) = alpha w_c [ (w/w_c) e^{-w/w_c} Ei(w/w_c) - 1 ],
/// valid for w != 0 (negative w via the negative branch of Ei).
double self_energy(const SpectralDensity& sd, double omega);

/// Analytic derivative Sigma'(w) = alpha [ (1 - w/w_c) e^{-w/w_c}
/// Ei(w/w_c) + 1 ].
double self_energy_deriv(const SpectralDensity& sd, double omega);

/// Negative-frequency pole of the Ohmic model.
struct BoundState {
    double omega_prime; // < 0
    double z_weight;    // residue Z = [1 - Sigma'(w')]^{-1}, in (0, 1]
};

/// Present iff alpha * w_c > w0. The pole frequency solves
/// w' = w0 + Sigma(w') on the negative axis.
std::optional<BoundState> bound_state(const SpectralDensity& sd);

/// Two-column CSV (omega, J) with '#' comments; omega is in units of
/// omega0 unless a "# units=absolute" header is present.
SpectralDensity load_tabulated_csv(std::istream& in, double omega0);
SpectralDensity load_tabulated_csv_file(const std::string& path,
                                        double omega0);

} // namespace memkit
