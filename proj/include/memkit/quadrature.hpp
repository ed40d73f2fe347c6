// Copyright (c) 2026 The memkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "memkit/common.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace memkit {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Cached rule of the given order (nodes by Newton iteration on P_n).
const GaussRule& gauss_legendre(int order);

/// Panel edges covering [a, b] with panel width <= max_width.
std::vector<double> uniform_edges(double a, double b, double max_width);

/// Geometrically graded edges from a towards b (a < b), starting at
/// width `first` and growing by `ratio`, clipped at max_width.
std::vector<double> graded_edges(double a, double b, double first,
                                 double ratio, double max_width);

/// Merge two sorted edge lists into one strictly increasing list.
std::vector<double> merge_edges(std::span<const double> lhs,
                                std::span<const double> rhs);

/// Composite Gauss-Legendre integral of f over consecutive panels.
cplx integrate_panels(const std::function<cplx(double)>& f,
                      std::span<const double> edges, int order);

/// Flattened quadrature mesh: absolute abscissae and combined
/// (panel-scaled) weights, reusable across many evaluations of
/// integrals that share the envelope but not the oscillatory factor.
struct NodeSet {
    std::vector<double> omega;
    std::vector<double> weight;
    std::size_t size() const { return omega.size(); }
};

NodeSet build_nodes(std::span<const double> edges, int order);

/// out[k] = sum_i amp[i] * exp(i * sign * omega[i] * (t0 + k*dt))
/// for k = 0..nt-1. This is the hot data-parallel kernel behind the
/// spectral-integral amplitude and the kernel tabulation; the parallel
/// version advances per-node phasors by recurrence inside OpenMP
/// threads, the serial reference evaluates std::exp directly.
std::vector<cplx> phase_sum_batch(std::span<const double> omega,
                                  std::span<const cplx> amp, double t0,
                                  double dt, std::size_t nt, double sign);

std::vector<cplx> phase_sum_batch_serial(std::span<const double> omega,
                                         std::span<const cplx> amp, double t0,
                                         double dt, std::size_t nt,
                                         double sign);

} // namespace memkit
