// Copyright (c) 2026 The memkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace memkit {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

/// Thrown when an iterative scheme or quadrature fails to converge.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what_arg)
        : std::runtime_error(what_arg) {}
};

} // namespace memkit
