// Copyright (c) 2026 The memkit authors
// SPDX-License-Identifier: Apache-2.0

#include "memkit/special_functions.hpp"

#include <cmath>
#include <limits>

namespace memkit {

namespace {

constexpr int kMaxIter = 400;

// Modified Lentz evaluation of the continued fraction
//   E1(z) = exp(-z) / (z + 1 - 1/(z + 3 - 4/(z + 5 - 9/(...))))
// valid for Re z >= 0, z != 0. Works for real and rotated (imaginary)
// arguments; convergence degrades as |z| -> 0, so callers switch to the
// power series there.
template <typename T>
T e1_continued_fraction(T z) {
    const double tiny = 1e-300;
    T b = z + 1.0;
    T c = 1.0 / tiny;
    T d = 1.0 / b;
    T f = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double a = -static_cast<double>(i) * static_cast<double>(i);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const T delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-16) {
            return std::exp(-z) * f;
        }
    }
    throw numerical_error("E1 continued fraction did not converge");
}

// Power series E1(x) = -gamma - ln x + sum (-1)^{n+1} x^n / (n n!),
// accurate for small positive x (alternating cancellation stays benign
// below the series/fraction switchover).
double e1_series(double x) {
    double sum = 0.0;
    double term = 1.0;
    for (int n = 1; n <= kMaxIter; ++n) {
        term *= -x / n;
        const double contrib = -term / n;
        sum += contrib;
        if (std::abs(contrib) < 1e-18 * (std::abs(sum) + 1e-30)) {
            return -euler_gamma - std::log(x) + sum;
        }
    }
    throw numerical_error("E1 series did not converge");
}

// Ei(x) = gamma + ln x + sum x^n / (n n!) for x > 0. All terms positive,
// so there is no cancellation and the series is usable far past the
// region where the asymptotic expansion becomes accurate.
double ei_series(double x) {
    double sum = 0.0;
    double term = 1.0;
    for (int n = 1; n <= kMaxIter; ++n) {
        term *= x / n;
        const double contrib = term / n;
        sum += contrib;
        if (contrib < 1e-18 * sum) {
            return euler_gamma + std::log(x) + sum;
        }
    }
    throw numerical_error("Ei series did not converge");
}

// Asymptotic expansion Ei(x) ~ e^x/x (1 + 1!/x + 2!/x^2 + ...), truncated
// at the smallest term. Used only for x large enough that the smallest
// term is below double precision.
double ei_asymptotic(double x) {
    double sum = 1.0;
    double term = 1.0;
    for (int n = 1; n <= kMaxIter; ++n) {
        const double next = term * n / x;
        if (next >= term) {
            break; // divergence point reached
        }
        term = next;
        sum += term;
        if (term < 1e-18 * sum) {
            break;
        }
    }
    return std::exp(x) / x * sum;
}

// Series switchovers. The positive branch keeps the (cancellation-free)
// series up to 40; the negative branch hands over to the continued
// fraction at 3 before alternating-series cancellation costs digits.
constexpr double kPositiveSeriesMax = 40.0;
constexpr double kNegativeSeriesMax = 3.0;

} // namespace

double exp_integral_e1(double x) {
    if (x <= 0.0) {
        throw std::domain_error("exp_integral_e1: requires x > 0");
    }
    if (x <= kNegativeSeriesMax) {
        return e1_series(x);
    }
    return e1_continued_fraction(x);
}

double exp_integral_ei(double x) {
    if (x == 0.0) {
        throw std::domain_error("exp_integral_ei: singular at x = 0");
    }
    if (x < 0.0) {
        return -exp_integral_e1(-x);
    }
    if (x <= kPositiveSeriesMax) {
        return ei_series(x);
    }
    return ei_asymptotic(x);
}

SinCosIntegrals sin_cos_integrals(double x) {
    if (x <= 0.0) {
        throw std::domain_error("sin_cos_integrals: requires x > 0");
    }
    if (x <= 2.0) {
        // Power series around 0.
        double si = x;
        double term_s = x;
        double ci_sum = 0.0;
        double term_c = 1.0;
        for (int k = 1; k <= kMaxIter; ++k) {
            // term_c becomes (-1)^k x^{2k} / (2k)!, term_s the sine analogue.
            term_c *= -x * x / ((2.0 * k - 1.0) * (2.0 * k));
            ci_sum += term_c / (2.0 * k);
            term_s *= -x * x / ((2.0 * k) * (2.0 * k + 1.0));
            si += term_s / (2.0 * k + 1.0);
            if (std::abs(term_s) < 1e-18 && std::abs(term_c) < 1e-18) {
                break;
            }
        }
        return {si, euler_gamma + std::log(x) + ci_sum};
    }
    // E1(ix) = -Ci(x) + i (Si(x) - pi/2) via the rotated continued fraction.
    const cplx e1 = e1_continued_fraction(cplx(0.0, x));
    return {pi / 2.0 + e1.imag(), -e1.real()};
}

} // namespace memkit
