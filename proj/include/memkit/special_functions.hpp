// Copyright (c) 2026 The memkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "memkit/common.hpp"

namespace memkit {

/// Principal-value exponential integral Ei(x).
/// For x < 0 this is the standard real value Ei(x) = -E1(-x).
/// Throws std::domain_error at x = 0 (logarithmic singularity).
double exp_integral_ei(double x);

/// E1(x) for x > 0.
double exp_integral_e1(double x);

struct SinCosIntegrals {
    double si; // Si(x) = int_0^x sin(t)/t dt
    double ci; // Ci(x) = -int_x^inf cos(t)/t dt
};

/// Sine and cosine integrals for x > 0.
SinCosIntegrals sin_cos_integrals(double x);

} // namespace memkit
