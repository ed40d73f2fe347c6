// Copyright (c) 2026 The memkit authors
// SPDX-License-Identifier: Apache-2.0

#include "memkit/maps.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace memkit {

namespace {

double max_abs(const Matrix4& m) {
    double s = 0.0;
    for (const cplx& v : m) {
        s = std::max(s, std::abs(v));
    }
    return s;
}

void require_hermitian(const Matrix4& m, double scale) {
    for (int r = 0; r < 4; ++r) {
        for (int c = r; c < 4; ++c) {
            if (std::abs(at(m, r, c) - std::conj(at(m, c, r))) >
                1e-10 * std::max(1.0, scale)) {
                throw std::domain_error(
                    "hermitian_eigenvalues: matrix is not Hermitian");
            }
        }
    }
}

// Channel differences in this model are nonzero only on the diagonal and
// the (0,3) corner; that pattern diagonalizes by hand.
bool has_corner_block_pattern(const Matrix4& m, double scale) {
    const double tol = 1e-14 * std::max(1.0, scale);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            if (r == c || (r == 0 && c == 3) || (r == 3 && c == 0)) {
                continue;
            }
            if (std::abs(at(m, r, c)) > tol) {
                return false;
            }
        }
    }
    return true;
}

std::array<double, 4> corner_block_eigenvalues(const Matrix4& m) {
    const double a = at(m, 0, 0).real();
    const double d = at(m, 3, 3).real();
    const double half_gap = 0.5 * (a - d);
    const double r = std::hypot(half_gap, std::abs(at(m, 0, 3)));
    std::array<double, 4> ev = {0.5 * (a + d) - r, 0.5 * (a + d) + r,
                                at(m, 1, 1).real(), at(m, 2, 2).real()};
    std::sort(ev.begin(), ev.end());
    return ev;
}

double off_diagonal_norm(const Matrix4& m) {
    double s = 0.0;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            if (r != c) {
                s += std::norm(at(m, r, c));
            }
        }
    }
    return std::sqrt(s);
}

} // namespace

void DensityMatrix::validate() const {
    const double tol = 1e-12;
    if (std::abs(rho12 - std::conj(rho21)) > tol ||
        std::abs(rho11.imag()) > tol || std::abs(rho22.imag()) > tol) {
        throw std::domain_error("DensityMatrix: not Hermitian");
    }
    if (std::abs(rho11.real() + rho22.real() - 1.0) > tol) {
        throw std::domain_error("DensityMatrix: trace != 1");
    }
    const double mean = 0.5 * (rho11.real() + rho22.real());
    const double r = std::hypot(0.5 * (rho11.real() - rho22.real()),
                                std::abs(rho12));
    if (mean - r < -tol) {
        throw std::domain_error("DensityMatrix: negative eigenvalue");
    }
}

QubitChannel::QubitChannel(cplx amplitude) : c(amplitude) {
    if (!(std::abs(amplitude) <= 1.0 + 1e-9)) {
        throw std::invalid_argument("QubitChannel: |c| must be <= 1");
    }
}

cplx ChoiMatrix::trace() const {
    return at(m, 0, 0) + at(m, 1, 1) + at(m, 2, 2) + at(m, 3, 3);
}

DensityMatrix apply(const QubitChannel& ch, const DensityMatrix& rho) {
    const double p = std::norm(ch.c);
    DensityMatrix out;
    out.rho11 = p * rho.rho11;
    out.rho12 = ch.c * rho.rho12;
    out.rho21 = std::conj(ch.c) * rho.rho21;
    out.rho22 = 1.0 - p * rho.rho11;
    return out;
}

QubitChannel compose(const QubitChannel& outer, const QubitChannel& inner) {
    return QubitChannel(outer.c * inner.c);
}

ChoiMatrix choi(const QubitChannel& ch) {
    const double p = std::norm(ch.c);
    ChoiMatrix rho;
    at(rho.m, 0, 0) = 0.5 * p;
    at(rho.m, 0, 3) = 0.5 * ch.c;
    at(rho.m, 2, 2) = 0.5 * (1.0 - p);
    at(rho.m, 3, 0) = 0.5 * std::conj(ch.c);
    at(rho.m, 3, 3) = 0.5;
    return rho;
}

EigenSystem4 jacobi_eigensystem(const Matrix4& m) {
    const double scale = max_abs(m);
    require_hermitian(m, scale);

    Matrix4 a = m;
    // Symmetrize to wipe representation noise.
    for (int r = 0; r < 4; ++r) {
        for (int c = r + 1; c < 4; ++c) {
            const cplx v = 0.5 * (at(a, r, c) + std::conj(at(a, c, r)));
            at(a, r, c) = v;
            at(a, c, r) = std::conj(v);
        }
        at(a, r, r) = cplx(at(a, r, r).real(), 0.0);
    }

    Matrix4 v{};
    for (int i = 0; i < 4; ++i) {
        at(v, i, i) = 1.0;
    }

    const double stop = 1e-15 * std::max(1.0, scale);
    for (int sweep = 0; sweep < 60; ++sweep) {
        if (off_diagonal_norm(a) < stop) {
            break;
        }
        for (int p = 0; p < 4; ++p) {
            for (int q = p + 1; q < 4; ++q) {
                const cplx apq = at(a, p, q);
                const double mag = std::abs(apq);
                if (mag < 1e-300) {
                    continue;
                }
                const cplx phase = apq / mag; // e^{i phi}
                const double tau =
                    (at(a, q, q).real() - at(a, p, p).real()) / (2.0 * mag);
                const double sign = tau >= 0.0 ? 1.0 : -1.0;
                const double t =
                    sign / (std::abs(tau) + std::hypot(1.0, tau));
                const double c = 1.0 / std::hypot(1.0, t);
                const double s = t * c;
                const cplx sp = s * phase;

                // A <- A J (columns p, q)
                for (int k = 0; k < 4; ++k) {
                    const cplx akp = at(a, k, p);
                    const cplx akq = at(a, k, q);
                    at(a, k, p) = c * akp - std::conj(sp) * akq;
                    at(a, k, q) = sp * akp + c * akq;
                }
                // A <- J^dag A (rows p, q)
                for (int k = 0; k < 4; ++k) {
                    const cplx apk = at(a, p, k);
                    const cplx aqk = at(a, q, k);
                    at(a, p, k) = c * apk - sp * aqk;
                    at(a, q, k) = std::conj(sp) * apk + c * aqk;
                }
                // V <- V J
                for (int k = 0; k < 4; ++k) {
                    const cplx vkp = at(v, k, p);
                    const cplx vkq = at(v, k, q);
                    at(v, k, p) = c * vkp - std::conj(sp) * vkq;
                    at(v, k, q) = sp * vkp + c * vkq;
                }
            }
        }
    }

    std::array<int, 4> order = {0, 1, 2, 3};
    std::sort(order.begin(), order.end(), [&](int lhs, int rhs) {
        return at(a, lhs, lhs).real() < at(a, rhs, rhs).real();
    });

    EigenSystem4 out;
    for (int i = 0; i < 4; ++i) {
        out.values[i] = at(a, order[i], order[i]).real();
        for (int k = 0; k < 4; ++k) {
            at(out.vectors, k, i) = at(v, k, order[i]);
        }
    }
    return out;
}

std::array<double, 4> jacobi_eigenvalues(const Matrix4& m) {
    return jacobi_eigensystem(m).values;
}

std::array<double, 4> hermitian_eigenvalues(const Matrix4& m) {
    const double scale = max_abs(m);
    require_hermitian(m, scale);
    if (has_corner_block_pattern(m, scale)) {
        return corner_block_eigenvalues(m);
    }
    return jacobi_eigenvalues(m);
}

double trace_distance(const ChoiMatrix& a, const ChoiMatrix& b) {
    Matrix4 diff;
    for (std::size_t i = 0; i < diff.size(); ++i) {
        diff[i] = a.m[i] - b.m[i];
    }
    const auto ev = hermitian_eigenvalues(diff);
    double sum = 0.0;
    for (double lambda : ev) {
        sum += std::abs(lambda);
    }
    return 0.5 * sum;
}

std::string choi_to_json(const ChoiMatrix& choi, int indent) {
    nlohmann::json data = nlohmann::json::array();
    for (const cplx& v : choi.m) {
        data.push_back({v.real(), v.imag()});
    }
    nlohmann::json j;
    j["dim"] = 4;
    j["data"] = data;
    return j.dump(indent) + "\n";
}

} // namespace memkit
