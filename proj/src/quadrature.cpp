// Copyright (c) 2026 The memkit authors
// SPDX-License-Identifier: Apache-2.0

#include "memkit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <omp.h>

namespace memkit {

namespace {

GaussRule compute_gauss_rule(int order) {
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-based starting guess, then Newton on P_n.
        double x = std::cos(pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int n = 2; n <= order; ++n) {
                const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) {
                break;
            }
        }
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    return rule;
}

} // namespace

const GaussRule& gauss_legendre(int order) {
    static std::mutex mutex;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) {
        it = cache.emplace(order, compute_gauss_rule(order)).first;
    }
    return it->second;
}

std::vector<double> uniform_edges(double a, double b, double max_width) {
    if (!(b > a) || !(max_width > 0.0)) {
        throw std::invalid_argument("uniform_edges: invalid interval or width");
    }
    if ((b - a) / max_width > 3e7) {
        throw numerical_error("uniform_edges: panel count out of range");
    }
    const auto n = static_cast<std::size_t>(std::ceil((b - a) / max_width));
    std::vector<double> edges(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        edges[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
    }
    edges.back() = b;
    return edges;
}

std::vector<double> graded_edges(double a, double b, double first, double ratio,
                                 double max_width) {
    if (!(b > a) || !(first > 0.0) || !(ratio > 1.0)) {
        throw std::invalid_argument("graded_edges: invalid parameters");
    }
    std::vector<double> edges{a};
    double width = first;
    double x = a;
    while (x < b) {
        x = std::min(b, x + std::min(width, max_width));
        edges.push_back(x);
        width *= ratio;
    }
    return edges;
}

std::vector<double> merge_edges(std::span<const double> lhs,
                                std::span<const double> rhs) {
    std::vector<double> all(lhs.begin(), lhs.end());
    all.insert(all.end(), rhs.begin(), rhs.end());
    std::sort(all.begin(), all.end());
    std::vector<double> out;
    out.reserve(all.size());
    for (double e : all) {
        if (out.empty() || e > out.back() * (1.0 + 1e-14) + 1e-300) {
            out.push_back(e);
        }
    }
    return out;
}

cplx integrate_panels(const std::function<cplx(double)>& f,
                      std::span<const double> edges, int order) {
    const GaussRule& rule = gauss_legendre(order);
    cplx total = 0.0;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double mid = 0.5 * (edges[p] + edges[p + 1]);
        const double hw = 0.5 * (edges[p + 1] - edges[p]);
        cplx panel = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            panel += rule.weights[i] * f(mid + hw * rule.nodes[i]);
        }
        total += hw * panel;
    }
    return total;
}

NodeSet build_nodes(std::span<const double> edges, int order) {
    const GaussRule& rule = gauss_legendre(order);
    NodeSet set;
    const std::size_t count = (edges.size() - 1) * rule.nodes.size();
    set.omega.reserve(count);
    set.weight.reserve(count);
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const double mid = 0.5 * (edges[p] + edges[p + 1]);
        const double hw = 0.5 * (edges[p + 1] - edges[p]);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            set.omega.push_back(mid + hw * rule.nodes[i]);
            set.weight.push_back(hw * rule.weights[i]);
        }
    }
    return set;
}

std::vector<cplx> phase_sum_batch_serial(std::span<const double> omega,
                                         std::span<const cplx> amp, double t0,
                                         double dt, std::size_t nt,
                                         double sign) {
    std::vector<cplx> out(nt, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < nt; ++k) {
        const double t = t0 + dt * static_cast<double>(k);
        cplx sum = 0.0;
        for (std::size_t i = 0; i < omega.size(); ++i) {
            sum += amp[i] * std::exp(cplx(0.0, sign * omega[i] * t));
        }
        out[k] = sum;
    }
    return out;
}

std::vector<cplx> phase_sum_batch(std::span<const double> omega,
                                  std::span<const cplx> amp, double t0,
                                  double dt, std::size_t nt, double sign) {
    std::vector<cplx> out(nt, cplx(0.0, 0.0));
    if (nt == 0 || omega.empty()) {
        return out;
    }
    const auto n = static_cast<std::ptrdiff_t>(omega.size());
    // Per-thread partial sums merged in fixed thread order so results are
    // reproducible run to run for a given thread count.
    std::vector<std::vector<cplx>> partial(omp_get_max_threads());
#pragma omp parallel
    {
        auto& local = partial[omp_get_thread_num()];
        local.assign(nt, cplx(0.0, 0.0));
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            // Per-node phasor recurrence over the uniform time grid.
            cplx phase = std::exp(cplx(0.0, sign * omega[i] * t0));
            const cplx step = std::exp(cplx(0.0, sign * omega[i] * dt));
            const cplx a = amp[i];
            for (std::size_t k = 0; k < nt; ++k) {
                local[k] += a * phase;
                phase *= step;
            }
        }
    }
    for (const auto& local : partial) {
        for (std::size_t k = 0; k < local.size(); ++k) {
            out[k] += local[k];
        }
    }
    return out;
}

} // namespace memkit
