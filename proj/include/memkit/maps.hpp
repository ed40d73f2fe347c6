// Copyright (c) 2026 The memkit authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "memkit/common.hpp"

#include <array>
#include <string>

namespace memkit {

/// 2x2 qubit density matrix in the {|e>, |g>} basis (index 1 = excited).
struct DensityMatrix {
    cplx rho11{0.0, 0.0};
    cplx rho12{0.0, 0.0};
    cplx rho21{0.0, 0.0};
    cplx rho22{0.0, 0.0};

    static DensityMatrix excited() { return {1.0, 0.0, 0.0, 0.0}; }
    static DensityMatrix ground() { return {0.0, 0.0, 0.0, 1.0}; }

    /// Checks hermiticity, unit trace (1e-12) and positivity (-1e-12).
    void validate() const;

    double excited_population() const { return rho11.real(); }
};

/// Memoryless qubit map parametrized by a single complex amplitude c:
/// excited population scales by |c|^2, coherences by c.
struct QubitChannel {
    cplx c{1.0, 0.0};

    explicit QubitChannel(cplx amplitude);
};

/// Row-major complex 4x4.
using Matrix4 = std::array<cplx, 16>;

inline cplx& at(Matrix4& m, int r, int c) { return m[4 * r + c]; }
inline const cplx& at(const Matrix4& m, int r, int c) { return m[4 * r + c]; }

/// Choi-Jamiolkowski state of a channel: (ch x id) applied to the
/// maximally entangled pair, normalized to unit trace.
struct ChoiMatrix {
    Matrix4 m{};

    cplx trace() const;
};

DensityMatrix apply(const QubitChannel& ch, const DensityMatrix& rho);

/// Concatenation outer . inner; amplitudes multiply.
QubitChannel compose(const QubitChannel& outer, const QubitChannel& inner);

ChoiMatrix choi(const QubitChannel& ch);

/// Eigenvalues of a Hermitian 4x4, ascending. Uses the analytic 2x2
/// block reduction when the matrix has the channel-difference sparsity
/// pattern, a cyclic Jacobi sweep otherwise. Throws std::domain_error if
/// the hermiticity residual exceeds 1e-10.
std::array<double, 4> hermitian_eigenvalues(const Matrix4& m);

/// Generic Jacobi route, exposed so tests can cross-check the closed
/// forms against an independent eigensolve.
std::array<double, 4> jacobi_eigenvalues(const Matrix4& m);

struct EigenSystem4 {
    std::array<double, 4> values; // ascending
    Matrix4 vectors;              // columns are eigenvectors
};

EigenSystem4 jacobi_eigensystem(const Matrix4& m);

/// D(a, b) = 1/2 * sum |eig(a - b)|; symmetric, in [0, 1] for states.
double trace_distance(const ChoiMatrix& a, const ChoiMatrix& b);

/// Row-major JSON layout: {"dim":4, "data":[[re, im], ...]}.
std::string choi_to_json(const ChoiMatrix& choi, int indent = 2);

} // namespace memkit
