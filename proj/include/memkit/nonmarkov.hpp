// Copyright (c) 2026 The memkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "memkit/amplitude.hpp"
#include "memkit/maps.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace memkit {

/// One divisibility-gap sample D(T(t2,t0), T(t2,t1) T(t1,t0)) at the time
/// offsets tau10 = t1 - t0, tau21 = t2 - t1 (tau20 = tau10 + tau21).
struct GapPoint {
    double tau10 = 0.0;
    double tau21 = 0.0;
    double gap = 0.0;
    double m_term = 0.0; // M' = |c20|^2 - |c10 c21|^2
    double n_term = 0.0; // N' = |c20|^2 + |c10 c21|^2
    double k_term = 0.0; // K  = Re[c20 c10* c21*]
};

struct NmOptions {
    int coarse_n = 96;       // grid points per tau axis (>= 32)
    bool refine = true;      // Nelder-Mead polish from the best grid cells
    double simplex_tol = 1e-8; // simplex diameter tolerance, relative to horizon
    int max_refine_iters = 200;
    bool parallel = true;
};

struct NmResult {
    double n_m = 0.0;
    double tau10_star = 0.0;
    double tau21_star = 0.0;
    int grid_size = 0;
    bool refined = false;
    double horizon = 0.0;
    long evaluations = 0;
    bool horizon_warning = false; // all-zero gaps with |c(horizon)| > 0.9
};

/// Closed form for real amplitudes, with M = c20 - c10 c21 and
/// N = c20 + c10 c21:
///   (1/8)|M (N + sqrt(4 + N^2))| + (1/8)|M (N - sqrt(4 + N^2))| + (1/4)|M N|.
double gap_closed_real(double c20, double c10, double c21);

/// Closed form for complex amplitudes in terms of M', N', K:
///   (1/8)|M' - sqrt(M'^2 + 4(N' - 2K))|
/// + (1/8)|M' + sqrt(M'^2 + 4(N' - 2K))| + (1/4)|M'|,
/// where N' - 2K = |c20 - c10 c21|^2.
double gap_closed_complex(cplx c20, cplx c10, cplx c21);

/// Gap via the explicit Choi matrices and the Hermitian eigensolver.
GapPoint divisibility_gap(const AmplitudeFn& cfun, double tau10, double tau21);

/// Flattened gap surface on taus x taus (row-major), the data-parallel
/// kernel inside measure_nm; serial version kept as the reference.
std::vector<double> gap_grid(const AmplitudeFn& cfun,
                             const std::vector<double>& taus);
std::vector<double> gap_grid_serial(const AmplitudeFn& cfun,
                                    const std::vector<double>& taus);

/// N_M = max_{tau10, tau21} D, by deterministic coarse grid search
/// (log-spaced near zero, linear beyond) plus optional Nelder-Mead
/// polish. `cfun` must be evaluable on [0, 2 * horizon].
NmResult measure_nm(const AmplitudeFn& cfun, double horizon,
                    const NmOptions& options = {});

/// rho(t2) evolved from 0 versus the evolution restarted at t1 with the
/// same state: a nonzero difference witnesses memory.
std::pair<DensityMatrix, DensityMatrix>
witness_evolutions(const AmplitudeFn& cfun, double t1, double t2,
                   const DensityMatrix& rho0);

struct ScanPoint {
    double parameter;
    SpectralDensity sd;
};

struct ScanOptions {
    NmOptions nm;
    double horizon_override = 0.0;
    double step_override = 0.0;
    bool parallel = true; // scan points are embarrassingly parallel
};

struct ScanRecord {
    double parameter = 0.0;
    NmResult result;
    bool failed = false;
    std::string error;
};

/// Per-point N_M; failures are recorded and the scan continues. Output
/// order always matches input order.
std::vector<ScanRecord> nm_scan(const std::vector<ScanPoint>& points,
                                const ScanOptions& options = {});

/// CSV columns: parameter, n_m, tau10_star, tau21_star, evaluations.
void write_scan_csv(const std::vector<ScanRecord>& records, std::ostream& out);

/// JSON variant with full NmResult records.
std::string scan_to_json(const std::vector<ScanRecord>& records,
                         int indent = 2);

} // namespace memkit
