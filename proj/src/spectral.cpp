// Copyright (c) 2026 The memkit authors
// SPDX-License-Identifier: Apache-2.0

#include "memkit/spectral.hpp"

#include "memkit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace memkit {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string("SpectralDensity: ") + name +
                                    " must be strictly positive");
    }
}

// x e^{-x} Ei(x), evaluated without overflow for any x. Beyond |x| = 40
// the direct product would pair a huge exponential with a tiny Ei (or
// vice versa), so the asymptotic series sum_n n!/x^n is used instead.
double x_exp_ei(double x) {
    if (std::abs(x) <= 40.0) {
        return x * std::exp(-x) * exp_integral_ei(x);
    }
    double sum = 1.0;
    double term = 1.0;
    for (int n = 1; n < 80; ++n) {
        const double next = term * n / x;
        if (std::abs(next) >= std::abs(term)) {
            break;
        }
        term = next;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) {
            break;
        }
    }
    return sum;
}

constexpr int kGaussOrder = 8;
constexpr int kGaussOrderCheck = 16;
constexpr double kOhmicCutoffFactor = 40.0; // integrate J_O out to 40 w_c
constexpr std::size_t kMaxMeshNodes = 8u << 20;

void check_mesh_size(std::size_t panels) {
    if (panels * kGaussOrderCheck > kMaxMeshNodes) {
        throw numerical_error("correlation_kernel: quadrature mesh too large");
    }
}

// int_a^inf e^{i u tau} (1/u^2 - lambda^2/u^4) du, the analytic tail of
// the negative-frequency Lorentzian correction. Exact up to the dropped
// lambda^4/u^6 term; callers keep a >= 20 lambda.
cplx lorentz_tail(double a, double lambda, double tau) {
    if (tau == 0.0) {
        return cplx(1.0 / a - lambda * lambda / (3.0 * a * a * a), 0.0);
    }
    const double x = a * tau;
    const auto [si, ci] = sin_cos_integrals(x);
    const cplx i1(-ci, pi / 2.0 - si);
    const cplx e = std::exp(cplx(0.0, x));
    const cplx itau(0.0, tau);
    const cplx i2 = e / a + itau * i1;
    const cplx i3 = e / (2.0 * a * a) + itau / 2.0 * i2;
    const cplx i4 = e / (3.0 * a * a * a) + itau / 3.0 * i3;
    return i2 - lambda * lambda * i4;
}

struct TruncLorentzMesh {
    double a = 0.0;          // start of the analytic tail
    std::vector<double> edges; // quadrature panels on [omega0, a], may be empty
};

// u-domain mesh for f_neg(tau) = int_{w0}^inf A e^{i u tau}/(u^2+l^2) du.
// When w0 >= 20 lambda the whole integral is in the tail regime and no
// panels are needed at all.
TruncLorentzMesh trunc_lorentz_mesh(const SpectralDensity& sd,
                                    double tau_max) {
    TruncLorentzMesh mesh;
    const double w0 = sd.omega0();
    const double lambda = sd.lambda();
    mesh.a = std::max(w0, 20.0 * lambda);
    if (mesh.a > w0 * (1.0 + 1e-12)) {
        const double envelope = std::max(lambda, w0) / 4.0;
        const double width =
            tau_max > 0.0 ? std::min(envelope, pi / (4.0 * tau_max)) : envelope;
        mesh.edges = uniform_edges(w0, mesh.a, width);
        check_mesh_size(mesh.edges.size());
    }
    return mesh;
}

double lorentz_peak_weight(const SpectralDensity& sd) {
    return sd.gamma0() * sd.lambda() * sd.lambda() / (2.0 * pi);
}

cplx trunc_lorentz_neg_part(const SpectralDensity& sd, double tau) {
    const double a_coef = lorentz_peak_weight(sd);
    const double lambda = sd.lambda();
    const TruncLorentzMesh mesh = trunc_lorentz_mesh(sd, tau);
    cplx quad = 0.0;
    if (!mesh.edges.empty()) {
        auto f = [&](double u) {
            return a_coef / (u * u + lambda * lambda) *
                   std::exp(cplx(0.0, u * tau));
        };
        const cplx i8 = integrate_panels(f, mesh.edges, kGaussOrder);
        const cplx i16 = integrate_panels(f, mesh.edges, kGaussOrderCheck);
        if (std::abs(i8 - i16) > 1e-9 * sd.mass() + 1e-14) {
            throw numerical_error(
                "correlation_kernel: panel estimates disagree (truncated "
                "Lorentzian)");
        }
        quad = i16;
    }
    return quad + a_coef * lorentz_tail(mesh.a, lambda, tau);
}

std::vector<double> half_line_edges(const SpectralDensity& sd, double tau) {
    if (sd.kind() == SpectralKind::Ohmic) {
        const double wc = sd.omega_c();
        const double envelope = wc / 4.0;
        const double width =
            tau > 0.0 ? std::min(envelope, pi / (4.0 * tau)) : envelope;
        auto edges = uniform_edges(0.0, kOhmicCutoffFactor * wc, width);
        check_mesh_size(edges.size());
        return edges;
    }
    // Tabulated: every sample is a panel edge so the piecewise-linear
    // envelope stays smooth inside each panel.
    const auto& table = sd.table();
    std::vector<double> edges;
    for (std::size_t s = 0; s + 1 < table.size(); ++s) {
        const double lo = table[s].omega;
        const double hi = table[s + 1].omega;
        if (!(hi > lo)) {
            continue;
        }
        const double span = hi - lo;
        const double width =
            tau > 0.0 ? std::min(span, pi / (4.0 * tau)) : span;
        auto sub = uniform_edges(lo, hi, width);
        if (!edges.empty()) {
            sub.erase(sub.begin());
        }
        edges.insert(edges.end(), sub.begin(), sub.end());
    }
    check_mesh_size(edges.size());
    return edges;
}

cplx half_line_kernel(const SpectralDensity& sd, double tau) {
    const auto edges = half_line_edges(sd, tau);
    if (edges.size() < 2) {
        return 0.0;
    }
    const double w0 = sd.omega0();
    auto f = [&](double w) {
        return density_at(sd, w) * std::exp(cplx(0.0, (w0 - w) * tau));
    };
    const cplx i8 = integrate_panels(f, edges, kGaussOrder);
    const cplx i16 = integrate_panels(f, edges, kGaussOrderCheck);
    if (std::abs(i8 - i16) > 1e-9 * sd.mass() + 1e-14) {
        throw numerical_error(
            "correlation_kernel: panel estimates disagree");
    }
    return i16;
}

cplx lorentzian_closed_kernel(const SpectralDensity& sd, double tau) {
    return cplx(0.5 * sd.gamma0() * sd.lambda() *
                    std::exp(-sd.lambda() * tau),
                0.0);
}

std::vector<cplx> kernel_grid_impl(const SpectralDensity& sd, double dt,
                                   std::size_t n, bool parallel) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("correlation_kernel_grid: dt must be > 0");
    }
    std::vector<cplx> out(n);
    if (n == 0) {
        return out;
    }
    const double tau_max = dt * static_cast<double>(n - 1);

    auto batch = [&](std::span<const double> omega, std::span<const cplx> amp,
                     double sign) {
        return parallel ? phase_sum_batch(omega, amp, 0.0, dt, n, sign)
                        : phase_sum_batch_serial(omega, amp, 0.0, dt, n, sign);
    };

    switch (sd.kind()) {
    case SpectralKind::Lorentzian: {
        for (std::size_t k = 0; k < n; ++k) {
            out[k] = lorentzian_closed_kernel(sd, dt * static_cast<double>(k));
        }
        return out;
    }
    case SpectralKind::TruncatedLorentzian: {
        const double a_coef = lorentz_peak_weight(sd);
        const double lambda = sd.lambda();
        const TruncLorentzMesh mesh = trunc_lorentz_mesh(sd, tau_max);
        std::vector<cplx> neg(n, cplx(0.0, 0.0));
        if (!mesh.edges.empty()) {
            NodeSet nodes = build_nodes(mesh.edges, kGaussOrder);
            std::vector<cplx> amp(nodes.size());
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                amp[i] = nodes.weight[i] * a_coef /
                         (nodes.omega[i] * nodes.omega[i] + lambda * lambda);
            }
            neg = batch(nodes.omega, amp, +1.0);
        }
        for (std::size_t k = 0; k < n; ++k) {
            const double tau = dt * static_cast<double>(k);
            out[k] = lorentzian_closed_kernel(sd, tau) - neg[k] -
                     a_coef * lorentz_tail(mesh.a, lambda, tau);
        }
        break;
    }
    case SpectralKind::Ohmic:
    case SpectralKind::Tabulated: {
        const auto edges = half_line_edges(sd, tau_max);
        if (edges.size() < 2) {
            return out;
        }
        NodeSet nodes = build_nodes(edges, kGaussOrder);
        std::vector<cplx> amp(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            amp[i] = nodes.weight[i] * density_at(sd, nodes.omega[i]);
        }
        out = batch(nodes.omega, amp, -1.0);
        const double w0 = sd.omega0();
        for (std::size_t k = 0; k < n; ++k) {
            out[k] *= std::exp(cplx(0.0, w0 * dt * static_cast<double>(k)));
        }
        break;
    }
    }

    // Spot-check the shared-mesh values against the per-tau route.
    for (std::size_t k : {n / 2, n - 1}) {
        if (k == 0) {
            continue;
        }
        const cplx ref = correlation_kernel(sd, dt * static_cast<double>(k));
        if (std::abs(out[k] - ref) > 1e-7 * sd.mass() + 1e-12) {
            throw numerical_error(
                "correlation_kernel_grid: grid/pointwise estimates disagree");
        }
    }
    return out;
}

} // namespace

SpectralDensity SpectralDensity::lorentzian(double gamma0, double lambda,
                                            double omega0) {
    require_positive(gamma0, "gamma0");
    require_positive(lambda, "lambda");
    require_positive(omega0, "omega0");
    SpectralDensity sd;
    sd.kind_ = SpectralKind::Lorentzian;
    sd.gamma0_ = gamma0;
    sd.lambda_ = lambda;
    sd.omega0_ = omega0;
    return sd;
}

SpectralDensity SpectralDensity::truncated_lorentzian(double gamma0,
                                                      double lambda,
                                                      double omega0) {
    SpectralDensity sd = lorentzian(gamma0, lambda, omega0);
    sd.kind_ = SpectralKind::TruncatedLorentzian;
    return sd;
}

SpectralDensity SpectralDensity::ohmic(double alpha, double omega_c,
                                       double omega0) {
    require_positive(alpha, "alpha");
    require_positive(omega_c, "omega_c");
    require_positive(omega0, "omega0");
    SpectralDensity sd;
    sd.kind_ = SpectralKind::Ohmic;
    sd.alpha_ = alpha;
    sd.omega_c_ = omega_c;
    sd.omega0_ = omega0;
    return sd;
}

SpectralDensity SpectralDensity::tabulated(std::vector<TableSample> table,
                                           double omega0) {
    require_positive(omega0, "omega0");
    if (table.size() < 2) {
        throw std::invalid_argument(
            "SpectralDensity: tabulated spectra need at least two samples");
    }
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (!std::isfinite(table[i].omega) || !std::isfinite(table[i].j)) {
            throw std::invalid_argument("SpectralDensity: non-finite sample");
        }
        if (table[i].omega < 0.0) {
            throw std::invalid_argument(
                "SpectralDensity: negative-frequency samples not supported");
        }
        if (table[i].j < 0.0) {
            throw std::invalid_argument("SpectralDensity: J(w) must be >= 0");
        }
        if (i > 0 && !(table[i].omega > table[i - 1].omega)) {
            throw std::invalid_argument(
                "SpectralDensity: samples must be strictly ascending in w");
        }
    }
    SpectralDensity sd;
    sd.kind_ = SpectralKind::Tabulated;
    sd.omega0_ = omega0;
    sd.table_ = std::move(table);
    return sd;
}

double SpectralDensity::mass() const {
    switch (kind_) {
    case SpectralKind::Lorentzian:
        return 0.5 * gamma0_ * lambda_;
    case SpectralKind::TruncatedLorentzian:
        return 0.5 * gamma0_ * lambda_ *
               (0.5 + std::atan(omega0_ / lambda_) / pi);
    case SpectralKind::Ohmic:
        return alpha_ * omega_c_ * omega_c_;
    case SpectralKind::Tabulated: {
        double sum = 0.0;
        for (std::size_t i = 0; i + 1 < table_.size(); ++i) {
            sum += 0.5 * (table_[i].j + table_[i + 1].j) *
                   (table_[i + 1].omega - table_[i].omega);
        }
        return sum;
    }
    }
    return 0.0;
}

double density_at(const SpectralDensity& sd, double omega) {
    switch (sd.kind()) {
    case SpectralKind::Lorentzian:
    case SpectralKind::TruncatedLorentzian: {
        if (sd.kind() == SpectralKind::TruncatedLorentzian && omega < 0.0) {
            return 0.0;
        }
        const double d = sd.omega0() - omega;
        return lorentz_peak_weight(sd) / (d * d + sd.lambda() * sd.lambda());
    }
    case SpectralKind::Ohmic:
        if (omega <= 0.0) {
            return 0.0;
        }
        return sd.alpha() * omega * std::exp(-omega / sd.omega_c());
    case SpectralKind::Tabulated: {
        const auto& table = sd.table();
        if (omega < table.front().omega || omega > table.back().omega) {
            return 0.0;
        }
        auto hi = std::upper_bound(
            table.begin(), table.end(), omega,
            [](double w, const TableSample& s) { return w < s.omega; });
        if (hi == table.begin()) {
            return table.front().j;
        }
        if (hi == table.end()) {
            return table.back().j;
        }
        const auto lo = hi - 1;
        const double frac = (omega - lo->omega) / (hi->omega - lo->omega);
        return lo->j + frac * (hi->j - lo->j);
    }
    }
    return 0.0;
}

cplx correlation_kernel(const SpectralDensity& sd, double tau) {
    if (tau < 0.0) {
        throw std::domain_error("correlation_kernel: requires tau >= 0");
    }
    switch (sd.kind()) {
    case SpectralKind::Lorentzian:
        return lorentzian_closed_kernel(sd, tau);
    case SpectralKind::TruncatedLorentzian:
        return lorentzian_closed_kernel(sd, tau) -
               trunc_lorentz_neg_part(sd, tau);
    case SpectralKind::Ohmic:
    case SpectralKind::Tabulated:
        return half_line_kernel(sd, tau);
    }
    return 0.0;
}

std::vector<cplx> correlation_kernel_grid(const SpectralDensity& sd, double dt,
                                          std::size_t n) {
    return kernel_grid_impl(sd, dt, n, true);
}

std::vector<cplx> correlation_kernel_grid_serial(const SpectralDensity& sd,
                                                 double dt, std::size_t n) {
    return kernel_grid_impl(sd, dt, n, false);
}

double self_energy(const SpectralDensity& sd, double omega) {
    if (sd.kind() != SpectralKind::Ohmic) {
        throw std::invalid_argument("self_energy: Ohmic spectra only");
    }
    if (omega == 0.0) {
        throw std::domain_error("self_energy: singular at omega = 0");
    }
    return sd.alpha() * sd.omega_c() * (x_exp_ei(omega / sd.omega_c()) - 1.0);
}

double self_energy_deriv(const SpectralDensity& sd, double omega) {
    if (sd.kind() != SpectralKind::Ohmic) {
        throw std::invalid_argument("self_energy_deriv: Ohmic spectra only");
    }
    if (omega == 0.0) {
        throw std::domain_error("self_energy_deriv: singular at omega = 0");
    }
    const double x = omega / sd.omega_c();
    return sd.alpha() * ((1.0 - x) / x * x_exp_ei(x) + 1.0);
}

std::optional<BoundState> bound_state(const SpectralDensity& sd) {
    if (sd.kind() != SpectralKind::Ohmic) {
        throw std::invalid_argument("bound_state: Ohmic spectra only");
    }
    const double w0 = sd.omega0();
    if (!(sd.alpha() * sd.omega_c() > w0)) {
        return std::nullopt;
    }
    const double scale = std::max(w0, sd.alpha() * sd.omega_c());
    // Note: the pole of 1/(w - w0 - Sigma(w)) solves w' = w0 + Sigma(w'),
    // which has a negative root exactly when alpha w_c > w0.
    auto g = [&](double w) { return w - w0 - self_energy(sd, w); };
    double lo = -1e3 * scale;
    double hi = -1e-12 * scale;
    double glo = g(lo);
    double ghi = g(hi);
    if (!(glo < 0.0) || !(ghi > 0.0)) {
        throw numerical_error("bound_state: root not bracketed");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid < hi) || !(mid > lo)) {
            break;
        }
        if (g(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-14 * std::abs(hi)) {
            break;
        }
    }
    const double root = 0.5 * (lo + hi);
    if (std::abs(g(root)) > 1e-10 * scale) {
        throw numerical_error("bound_state: bisection failed to converge");
    }
    const double z = 1.0 / (1.0 - self_energy_deriv(sd, root));
    return BoundState{root, z};
}

SpectralDensity load_tabulated_csv(std::istream& in, double omega0) {
    std::vector<TableSample> table;
    bool absolute = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            continue;
        }
        if (line[first] == '#') {
            if (line.find("units=absolute", first) != std::string::npos) {
                absolute = true;
            }
            continue;
        }
        std::string body = line.substr(first);
        std::replace(body.begin(), body.end(), ',', ' ');
        std::istringstream ss(body);
        double w = 0.0;
        double j = 0.0;
        if (!(ss >> w >> j)) {
            throw std::invalid_argument("tabulated CSV: malformed line " +
                                        std::to_string(lineno));
        }
        table.push_back({w, j});
    }
    if (!absolute) {
        for (auto& sample : table) {
            sample.omega *= omega0;
        }
    }
    return SpectralDensity::tabulated(std::move(table), omega0);
}

SpectralDensity load_tabulated_csv_file(const std::string& path,
                                        double omega0) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("tabulated CSV: cannot open " + path);
    }
    return load_tabulated_csv(in, omega0);
}

} // namespace memkit
