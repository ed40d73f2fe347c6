// Copyright (c) 2026 The memkit authors
// SPDX-License-Identifier: Apache-2.0

#include "memkit/amplitude.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

namespace memkit {

namespace {

constexpr double kDecayThreshold = 1e-4; // horizon: |c| below this is "decayed"
constexpr double kMaskThreshold = 1e-8;  // decay rates masked below this |c|

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// The product-integration march is an inherently sequential recurrence;
// parallelism in the solver comes from the kernel tabulation and from
// running the fine and step-doubled marches concurrently.
std::vector<cplx> volterra_march(const std::vector<cplx>& f, double h,
                                 std::size_t n_steps) {
    std::vector<cplx> c(n_steps + 1);
    c[0] = 1.0;
    const cplx f0 = f[0];
    cplx cdot = 0.0; // c_dot(0) = 0, the memory integral is empty
    for (std::size_t n = 0; n < n_steps; ++n) {
        cplx hist = 0.0;
        for (std::size_t j = 1; j <= n; ++j) {
            hist += f[n + 1 - j] * c[j];
        }
        const cplx s_next = h * (0.5 * f[n + 1] * c[0] + hist);
        const cplx c_pred = c[n] + h * cdot;
        const cplx cdot_pred = -(s_next + 0.5 * h * f0 * c_pred);
        c[n + 1] = c[n] + 0.5 * h * (cdot + cdot_pred);
        cdot = -(s_next + 0.5 * h * f0 * c[n + 1]);
    }
    for (const cplx& v : c) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw numerical_error("volterra_solve: solution is not finite");
        }
    }
    return c;
}

AmplitudeTrace volterra_impl(const SpectralDensity& sd, double t_max,
                             double step, bool parallel) {
    if (!(t_max > 0.0) || !(step > 0.0)) {
        throw std::invalid_argument("volterra_solve: t_max and step must be > 0");
    }
    if (step > t_max / 10.0 * (1.0 + 1e-12)) {
        throw std::invalid_argument("volterra_solve: step must be <= t_max/10");
    }
    const auto n_steps =
        static_cast<std::size_t>(std::ceil(t_max / step - 1e-9));
    const double h = t_max / static_cast<double>(n_steps);

    const std::vector<cplx> f =
        parallel ? correlation_kernel_grid(sd, h, n_steps + 1)
                 : correlation_kernel_grid_serial(sd, h, n_steps + 1);

    // Fine march plus the half-resolution march for the empirical
    // step-doubling estimate; the two recurrences are independent, so the
    // parallel path overlaps them.
    const std::size_t m = n_steps / 2;
    std::vector<cplx> f2(m + 1);
    for (std::size_t k = 0; k <= m; ++k) {
        f2[k] = f[2 * k];
    }
    std::vector<cplx> c;
    std::vector<cplx> cc;
    std::exception_ptr fine_error;
    std::exception_ptr coarse_error;
    if (parallel) {
#pragma omp parallel sections
        {
#pragma omp section
            {
                try {
                    c = volterra_march(f, h, n_steps);
                } catch (...) {
                    fine_error = std::current_exception();
                }
            }
#pragma omp section
            {
                try {
                    cc = volterra_march(f2, 2.0 * h, m);
                } catch (...) {
                    coarse_error = std::current_exception();
                }
            }
        }
    } else {
        c = volterra_march(f, h, n_steps);
        cc = volterra_march(f2, 2.0 * h, m);
    }
    if (fine_error) {
        std::rethrow_exception(fine_error);
    }
    if (coarse_error) {
        std::rethrow_exception(coarse_error);
    }

    AmplitudeTrace trace;
    trace.method = AmplitudeMethod::Volterra;
    trace.step = h;
    {
        double diff = 0.0;
        for (std::size_t k = 0; k <= m; ++k) {
            diff = std::max(diff, std::abs(c[2 * k] - cc[k]));
        }
        if (diff / 3.0 > 1e-3) {
            trace.coarse_step_warning = true;
        }
    }

    trace.grid.resize(n_steps + 1);
    for (std::size_t i = 0; i <= n_steps; ++i) {
        trace.grid[i] = h * static_cast<double>(i);
    }
    trace.values = std::move(c);
    trace.validate();
    return trace;
}

double horizon_from_samples(const std::vector<double>& grid,
                            const std::vector<cplx>& values, double cap) {
    double suffix = 0.0;
    double horizon = cap;
    bool found = false;
    for (std::size_t i = grid.size(); i-- > 0;) {
        suffix = std::max(suffix, std::abs(values[i]));
        if (suffix < kDecayThreshold) {
            horizon = grid[i];
            found = true;
        }
    }
    return found ? std::min(horizon, cap) : cap;
}

} // namespace

void AmplitudeTrace::validate() const {
    if (grid.size() != values.size() || grid.size() < 2) {
        throw std::invalid_argument("AmplitudeTrace: malformed grid");
    }
    if (grid.front() != 0.0) {
        throw std::invalid_argument("AmplitudeTrace: grid must start at 0");
    }
    if (values.front() != cplx(1.0, 0.0)) {
        throw std::invalid_argument("AmplitudeTrace: c(0) must be 1");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw std::invalid_argument(
                "AmplitudeTrace: grid must be strictly increasing");
        }
    }
    for (const cplx& v : values) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw numerical_error("AmplitudeTrace: non-finite amplitude");
        }
        if (std::abs(v) > 1.0 + 1e-9) {
            throw numerical_error("AmplitudeTrace: |c| exceeds 1");
        }
    }
}

cplx lorentzian_amplitude(double gamma0, double lambda, double t) {
    if (!(gamma0 > 0.0) || !(lambda > 0.0)) {
        throw std::invalid_argument(
            "lorentzian_amplitude: rates must be positive");
    }
    if (t < 0.0) {
        throw std::domain_error("lorentzian_amplitude: requires t >= 0");
    }
    const cplx d = std::sqrt(cplx(lambda * lambda - 2.0 * gamma0 * lambda, 0.0));
    const cplx z = 0.5 * d * t;
    const double decay = std::exp(-0.5 * lambda * t);
    cplx value;
    if (std::abs(z) < 0.02) {
        // Series limit of cosh(z) + (lambda t / 2) sinh(z)/z; covers the
        // critically damped point d = 0 (R = 1/2).
        const cplx z2 = z * z;
        const cplx cosh_part = 1.0 + z2 / 2.0 + z2 * z2 / 24.0;
        const cplx sinc_part = 1.0 + z2 / 6.0 + z2 * z2 / 120.0;
        value = decay * (cosh_part + 0.5 * lambda * t * sinc_part);
    } else {
        value = decay * (std::cosh(z) + lambda / d * std::sinh(z));
    }
    if (std::abs(value.imag()) < 1e-12) {
        value = cplx(value.real(), 0.0);
    }
    return value;
}

OhmicAmplitude::OhmicAmplitude(const SpectralDensity& sd, double t_support)
    : sd_(sd), t_support_(t_support) {
    if (sd.kind() != SpectralKind::Ohmic) {
        throw std::invalid_argument("OhmicAmplitude: Ohmic spectra only");
    }
    if (!(t_support > 0.0)) {
        throw std::invalid_argument("OhmicAmplitude: t_support must be > 0");
    }
    bound_ = bound_state(sd);

    const double wc = sd.omega_c();
    const double w0 = sd.omega0();
    const double alpha = sd.alpha();
    const double w_hi = 40.0 * wc;
    const double delta_ir = 1e-12 * wc;

    auto psi = [&](double w) { return w - w0 - self_energy(sd, w); };

    // Locate real resonances (roots of psi on the branch cut); the
    // integrand peaks there with half-width ~ J/(2 psi').
    std::vector<double> roots;
    {
        const int n_scan = 600;
        const double w_lo = 1e-9 * wc;
        double prev_w = w_lo;
        double prev_g = psi(prev_w);
        for (int i = 1; i <= n_scan; ++i) {
            const double w =
                w_lo * std::pow(w_hi / w_lo,
                                static_cast<double>(i) / n_scan);
            const double g = psi(w);
            if ((prev_g < 0.0) != (g < 0.0)) {
                double lo = prev_w;
                double hi = w;
                for (int it = 0; it < 100; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if ((psi(mid) < 0.0) == (prev_g < 0.0)) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                roots.push_back(0.5 * (lo + hi));
            }
            prev_w = w;
            prev_g = g;
        }
    }
    for (double r : roots) {
        resonance_max_ = std::max(resonance_max_, r);
    }

    // Base mesh: log-graded into the infrared (the integrand develops
    // 1/(w log^2 w) structure at critical coupling), uniform panels
    // bounded by a quarter oscillation period at the largest time.
    const double w_base = std::min(wc / 4.0, pi / (4.0 * t_support));
    std::vector<double> edges =
        graded_edges(delta_ir, w_hi, delta_ir, 1.25, w_base);

    std::vector<double> refine;
    for (double r : roots) {
        const double dpsi = std::abs(1.0 - self_energy_deriv(sd, r));
        const double half_width =
            std::max(pi * density_at(sd, r) / std::max(dpsi, 1e-8),
                     1e-13 * wc);
        refine.push_back(r);
        double off = half_width / 8.0;
        while (off < 120.0 * half_width) {
            if (r - off > delta_ir) {
                refine.push_back(r - off);
            }
            if (r + off < w_hi) {
                refine.push_back(r + off);
            }
            off *= 1.5;
        }
    }
    std::sort(refine.begin(), refine.end());
    edges = merge_edges(edges, refine);
    if (edges.size() > (1u << 22)) {
        throw numerical_error(
            "OhmicAmplitude: quadrature mesh too large for this t_support");
    }

    const NodeSet nodes = build_nodes(edges, 8);
    node_omega_ = nodes.omega;
    node_amp_.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double w = nodes.omega[i];
        const double j = density_at(sd, w);
        const double p = psi(w);
        // Spectral weight of the branch cut; together with the pole
        // residue it resolves the identity Z + int A = 1.
        const double a = j / (p * p + pi * pi * j * j);
        node_amp_[i] = cplx(nodes.weight[i] * a, 0.0);
    }

    // At critical coupling (alpha w_c = w0) the branch-cut weight decays
    // only like 1/log into the infrared; the piece below delta_ir has a
    // closed form: A -> 1/(alpha w [(ln(w/wc) + gamma - 1/alpha)^2 + pi^2]).
    const double d0 = alpha * wc - w0;
    if (std::abs(d0) <= 1e-8 * std::max(alpha * wc, w0)) {
        const double u = std::log(delta_ir / wc) + euler_gamma - 1.0 / alpha;
        ir_mass_ = (std::atan(u / pi) + 0.5 * pi) / (pi * alpha);
    }

    const double defect = sum_rule_defect();
    if (!(defect <= 1e-6)) {
        throw numerical_error(
            "OhmicAmplitude: spectral sum rule defect " +
            std::to_string(defect) + " exceeds 1e-6");
    }
}

cplx OhmicAmplitude::pole_and_ir(double t) const {
    cplx acc(ir_mass_, 0.0);
    if (bound_) {
        acc += bound_->z_weight *
               std::exp(cplx(0.0, -bound_->omega_prime * t));
    }
    return acc;
}

cplx OhmicAmplitude::operator()(double t) const {
    if (t < 0.0) {
        throw std::domain_error("OhmicAmplitude: requires t >= 0");
    }
    cplx acc = pole_and_ir(t);
    for (std::size_t i = 0; i < node_omega_.size(); ++i) {
        acc += node_amp_[i] * std::exp(cplx(0.0, -node_omega_[i] * t));
    }
    return std::exp(cplx(0.0, sd_.omega0() * t)) * acc;
}

double OhmicAmplitude::sum_rule_defect() const {
    return std::abs((*this)(0.0) - cplx(1.0, 0.0));
}

double OhmicAmplitude::max_phase_frequency() const {
    double freq = sd_.omega0();
    if (bound_) {
        freq = std::max(freq, std::abs(bound_->omega_prime));
    }
    freq = std::max(freq, resonance_max_);
    return freq;
}

AmplitudeTrace OhmicAmplitude::trace_impl(double t_max, double step,
                                          bool parallel) const {
    if (!(t_max > 0.0) || !(step > 0.0) || step >= t_max) {
        throw std::invalid_argument("OhmicAmplitude::trace: bad grid");
    }
    if (t_max > t_support_ * (1.0 + 1e-9)) {
        throw std::invalid_argument(
            "OhmicAmplitude::trace: grid exceeds the mesh t_support");
    }
    const auto n_steps = static_cast<std::size_t>(std::ceil(t_max / step - 1e-9));
    const double h = t_max / static_cast<double>(n_steps);
    const std::size_t n = n_steps + 1;

    std::vector<cplx> sums =
        parallel ? phase_sum_batch(node_omega_, node_amp_, 0.0, h, n, -1.0)
                 : phase_sum_batch_serial(node_omega_, node_amp_, 0.0, h, n,
                                          -1.0);

    AmplitudeTrace trace;
    trace.method = AmplitudeMethod::SpectralIntegral;
    trace.step = h;
    trace.grid.resize(n);
    trace.values.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = h * static_cast<double>(k);
        trace.grid[k] = t;
        trace.values[k] =
            std::exp(cplx(0.0, sd_.omega0() * t)) * (sums[k] + pole_and_ir(t));
    }

    // Guard against phasor-recurrence drift over long grids.
    const cplx direct = (*this)(trace.grid.back());
    if (std::abs(direct - trace.values.back()) > 1e-9) {
        throw numerical_error("OhmicAmplitude::trace: phase recurrence drift");
    }

    // Normalize away the (sum-rule checked) quadrature bias so that
    // c(0) = 1 holds exactly.
    const cplx norm = trace.values[0];
    for (auto& v : trace.values) {
        v /= norm;
    }
    trace.values[0] = cplx(1.0, 0.0);
    trace.validate();
    return trace;
}

AmplitudeTrace OhmicAmplitude::trace(double t_max, double step) const {
    return trace_impl(t_max, step, true);
}

AmplitudeTrace OhmicAmplitude::trace_serial(double t_max, double step) const {
    return trace_impl(t_max, step, false);
}

cplx ohmic_amplitude(const SpectralDensity& sd, double t) {
    const OhmicAmplitude oa(sd, std::max(t, 1.0 / sd.omega_c()));
    return oa(t);
}

AmplitudeTrace volterra_solve(const SpectralDensity& sd, double t_max,
                              double step) {
    return volterra_impl(sd, t_max, step, true);
}

AmplitudeTrace volterra_solve_serial(const SpectralDensity& sd, double t_max,
                                     double step) {
    return volterra_impl(sd, t_max, step, false);
}

DecayRates decay_rates(const AmplitudeTrace& trace) {
    const std::size_t n = trace.grid.size();
    if (n < 3) {
        throw std::invalid_argument("decay_rates: need at least 3 samples");
    }
    const auto& t = trace.grid;
    const auto& c = trace.values;
    DecayRates out;
    out.grid = t;
    out.gamma.assign(n, 0.0);
    out.s_shift.assign(n, 0.0);
    out.valid.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        cplx cdot;
        if (i == 0) {
            const double h = t[1] - t[0];
            cdot = (-3.0 * c[0] + 4.0 * c[1] - c[2]) / (2.0 * h);
        } else if (i == n - 1) {
            const double h = t[n - 1] - t[n - 2];
            cdot = (3.0 * c[n - 1] - 4.0 * c[n - 2] + c[n - 3]) / (2.0 * h);
        } else {
            cdot = (c[i + 1] - c[i - 1]) / (t[i + 1] - t[i - 1]);
        }
        if (std::abs(c[i]) < kMaskThreshold) {
            continue;
        }
        const cplx ratio = cdot / c[i];
        out.gamma[i] = -2.0 * ratio.real();
        out.s_shift[i] = -2.0 * ratio.imag();
        out.valid[i] = 1;
    }
    return out;
}

cplx amplitude_at(const AmplitudeTrace& trace, double t) {
    const auto& g = trace.grid;
    if (t < 0.0 || t > g.back() * (1.0 + 1e-12)) {
        throw std::domain_error("amplitude_at: t outside the sampled range");
    }
    t = std::min(t, g.back());
    // Lagrange stencil around the bracketing interval: 4 points (cubic)
    // when available, the whole grid for very short traces.
    const std::size_t width = std::min<std::size_t>(4, g.size());
    const auto hi = std::upper_bound(g.begin(), g.end(), t);
    std::size_t k = (hi == g.begin()) ? 0 : (hi - g.begin() - 1);
    if (k >= g.size() - 1) {
        k = g.size() - 2;
    }
    std::size_t lo = (k == 0) ? 0 : k - 1;
    lo = std::min(lo, g.size() - width);
    cplx sum = 0.0;
    for (std::size_t i = lo; i < lo + width; ++i) {
        double basis = 1.0;
        for (std::size_t j = lo; j < lo + width; ++j) {
            if (j != i) {
                basis *= (t - g[j]) / (g[i] - g[j]);
            }
        }
        sum += basis * trace.values[i];
    }
    return sum;
}

void write_trace_csv(const AmplitudeTrace& trace, std::ostream& out,
                     const std::string& params_comment) {
    const char* method = "closed-form";
    if (trace.method == AmplitudeMethod::SpectralIntegral) {
        method = "spectral-integral";
    } else if (trace.method == AmplitudeMethod::Volterra) {
        method = "volterra";
    }
    out << "# memkit amplitude trace\n";
    out << "# method=" << method << " step=" << format_g17(trace.step)
        << " coarse_step_warning=" << (trace.coarse_step_warning ? 1 : 0)
        << "\n";
    if (!params_comment.empty()) {
        out << "# " << params_comment << "\n";
    }
    out << "t,re_c,im_c\n";
    for (std::size_t i = 0; i < trace.grid.size(); ++i) {
        out << format_g17(trace.grid[i]) << ','
            << format_g17(trace.values[i].real()) << ','
            << format_g17(trace.values[i].imag()) << '\n';
    }
}

AmplitudeTrace read_trace_csv(std::istream& in) {
    AmplitudeTrace trace;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") {
            continue;
        }
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string token;
            while (ss >> token) {
                if (token.rfind("method=", 0) == 0) {
                    const std::string m = token.substr(7);
                    if (m == "closed-form") {
                        trace.method = AmplitudeMethod::ClosedForm;
                    } else if (m == "spectral-integral") {
                        trace.method = AmplitudeMethod::SpectralIntegral;
                    } else if (m == "volterra") {
                        trace.method = AmplitudeMethod::Volterra;
                    } else {
                        throw std::invalid_argument(
                            "trace CSV: unknown method tag " + m);
                    }
                } else if (token.rfind("step=", 0) == 0) {
                    trace.step = std::stod(token.substr(5));
                } else if (token.rfind("coarse_step_warning=", 0) == 0) {
                    trace.coarse_step_warning = token.back() == '1';
                }
            }
            continue;
        }
        if (!header_seen && line.rfind("t,", 0) == 0) {
            header_seen = true;
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double t = 0.0;
        double re = 0.0;
        double im = 0.0;
        if (!(ss >> t >> re >> im)) {
            throw std::invalid_argument("trace CSV: malformed data row");
        }
        trace.grid.push_back(t);
        trace.values.emplace_back(re, im);
    }
    trace.validate();
    return trace;
}

double decay_horizon(const AmplitudeFn& cfun, double cap, int samples) {
    if (!(cap > 0.0) || samples < 16) {
        throw std::invalid_argument("decay_horizon: bad arguments");
    }
    std::vector<double> grid(samples);
    std::vector<cplx> values(samples);
    for (int i = 0; i < samples; ++i) {
        grid[i] = cap * static_cast<double>(i) / (samples - 1);
        values[i] = cfun(grid[i]);
    }
    return horizon_from_samples(grid, values, cap);
}

AmplitudeTrace sample_amplitude(const AmplitudeFn& cfun, double t_max,
                                double step, AmplitudeMethod tag) {
    if (!(t_max > 0.0) || !(step > 0.0)) {
        throw std::invalid_argument("sample_amplitude: bad grid");
    }
    const auto n_steps = static_cast<std::size_t>(std::ceil(t_max / step - 1e-9));
    const double h = t_max / static_cast<double>(n_steps);
    AmplitudeTrace trace;
    trace.method = tag;
    trace.step = h;
    trace.grid.resize(n_steps + 1);
    trace.values.resize(n_steps + 1);
    for (std::size_t i = 0; i <= n_steps; ++i) {
        trace.grid[i] = h * static_cast<double>(i);
        trace.values[i] = cfun(trace.grid[i]);
    }
    trace.validate();
    return trace;
}

AmplitudeModel make_amplitude_model(const SpectralDensity& sd,
                                    const ModelOptions& options) {
    AmplitudeModel model;
    switch (sd.kind()) {
    case SpectralKind::Lorentzian: {
        const double g0 = sd.gamma0();
        const double l = sd.lambda();
        model.cfun = [g0, l](double t) { return lorentzian_amplitude(g0, l, t); };
        // The envelope decays at rate min(gamma0, lambda)/2: above critical
        // coupling |c| ~ e^{-lambda t/2}, so a cap in 1/gamma0 alone would
        // cut off the gap maximum at large R.
        const double cap = 50.0 / std::min(g0, l);
        model.horizon = options.horizon_override > 0.0
                            ? options.horizon_override
                            : decay_horizon(model.cfun, cap);
        return model;
    }
    case SpectralKind::Ohmic: {
        const double cap = options.horizon_override > 0.0
                               ? options.horizon_override
                               : 200.0 / sd.omega_c();
        const auto oa = std::make_shared<OhmicAmplitude>(sd, 2.0 * cap);
        double step = options.step_override;
        if (!(step > 0.0)) {
            step = 0.12 / oa->max_phase_frequency();
            step = std::max(step, 2.0 * cap / 60000.0);
            step = std::min(step, 2.0 * cap / 2000.0);
        }
        auto trace = std::make_shared<AmplitudeTrace>(
            options.parallel ? oa->trace(2.0 * cap, step)
                             : oa->trace_serial(2.0 * cap, step));
        model.bound = oa->bound();
        model.horizon = options.horizon_override > 0.0
                            ? options.horizon_override
                            : std::min(decay_horizon(
                                           [&](double t) {
                                               return amplitude_at(*trace, t);
                                           },
                                           cap),
                                       cap);
        model.cfun = [trace](double t) { return amplitude_at(*trace, t); };
        model.trace = *trace;
        return model;
    }
    case SpectralKind::TruncatedLorentzian:
    case SpectralKind::Tabulated: {
        const bool trunc = sd.kind() == SpectralKind::TruncatedLorentzian;
        const double cap = trunc
                               ? 50.0 / std::min(sd.gamma0(), sd.lambda())
                               : 200.0 / sd.omega0();
        double horizon = options.horizon_override;
        if (!(horizon > 0.0)) {
            // Cheap coarse pre-solve locates the decay horizon.
            const AmplitudeTrace probe =
                volterra_impl(sd, cap, cap / 2000.0, options.parallel);
            horizon = horizon_from_samples(probe.grid, probe.values, cap);
        }
        double step = options.step_override;
        if (!(step > 0.0)) {
            step = 2.0 * horizon / 4000.0;
            if (trunc) {
                step = std::min(step, 0.02 / sd.lambda());
            }
        }
        auto trace = std::make_shared<AmplitudeTrace>(
            volterra_impl(sd, 2.0 * horizon, step, options.parallel));
        model.horizon = horizon;
        model.cfun = [trace](double t) { return amplitude_at(*trace, t); };
        model.trace = *trace;
        return model;
    }
    }
    throw std::invalid_argument("make_amplitude_model: unknown spectral kind");
}

} // namespace memkit
