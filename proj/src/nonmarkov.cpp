// Copyright (c) 2026 The memkit authors
// SPDX-License-Identifier: Apache-2.0

#include "memkit/nonmarkov.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

namespace memkit {

namespace {

// Interpolated amplitudes can poke above unit modulus by the
// interpolation error; project back onto the physical disc.
cplx fetch_amplitude(const AmplitudeFn& cfun, double t) {
    cplx c = cfun(t);
    const double m = std::abs(c);
    if (m > 1.0) {
        c /= m;
    }
    return c;
}

std::vector<double> tau_grid(double horizon, int coarse_n) {
    // {0} + geometric [H/1000, H/10] + linear (H/10, H].
    std::vector<double> taus;
    taus.reserve(coarse_n);
    taus.push_back(0.0);
    const int n_geo = coarse_n / 2;
    const int n_lin = coarse_n - n_geo - 1;
    for (int k = 0; k < n_geo; ++k) {
        const double expo =
            n_geo == 1 ? 0.0 : static_cast<double>(k) / (n_geo - 1);
        taus.push_back(horizon * 1e-3 * std::pow(100.0, expo));
    }
    for (int j = 1; j <= n_lin; ++j) {
        taus.push_back(horizon * (0.1 + 0.9 * static_cast<double>(j) / n_lin));
    }
    return taus;
}

std::vector<double> gap_grid_impl(const AmplitudeFn& cfun,
                                  const std::vector<double>& taus,
                                  bool parallel) {
    const auto n = static_cast<std::ptrdiff_t>(taus.size());
    std::vector<cplx> cvals(taus.size());
    for (std::size_t i = 0; i < taus.size(); ++i) {
        cvals[i] = fetch_amplitude(cfun, taus[i]);
    }
    std::vector<double> gaps(taus.size() * taus.size(), 0.0);
#pragma omp parallel for schedule(static) if (parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        for (std::ptrdiff_t j = 0; j < n; ++j) {
            const cplx c20 = fetch_amplitude(cfun, taus[i] + taus[j]);
            gaps[static_cast<std::size_t>(i) * taus.size() +
                 static_cast<std::size_t>(j)] =
                gap_closed_complex(c20, cvals[i], cvals[j]);
        }
    }
    return gaps;
}

struct SimplexVertex {
    double x = 0.0;
    double y = 0.0;
    double value = 0.0; // gap (maximized)
};

} // namespace

double gap_closed_real(double c20, double c10, double c21) {
    const double m = c20 - c10 * c21;
    const double n = c20 + c10 * c21;
    const double root = std::sqrt(4.0 + n * n);
    return 0.125 * std::abs(m * (n + root)) + 0.125 * std::abs(m * (n - root)) +
           0.25 * std::abs(m * n);
}

double gap_closed_complex(cplx c20, cplx c10, cplx c21) {
    const cplx cc = c10 * c21;
    const double mp = std::norm(c20) - std::norm(cc);
    const double w = std::norm(c20 - cc); // N' - 2K, nonnegative by identity
    const double root = std::sqrt(mp * mp + 4.0 * w);
    return 0.125 * std::abs(mp - root) + 0.125 * std::abs(mp + root) +
           0.25 * std::abs(mp);
}

GapPoint divisibility_gap(const AmplitudeFn& cfun, double tau10, double tau21) {
    if (tau10 < 0.0 || tau21 < 0.0) {
        throw std::domain_error("divisibility_gap: offsets must be >= 0");
    }
    const cplx c10 = fetch_amplitude(cfun, tau10);
    const cplx c21 = fetch_amplitude(cfun, tau21);
    const cplx c20 = fetch_amplitude(cfun, tau10 + tau21);

    const ChoiMatrix direct = choi(QubitChannel(c20));
    const ChoiMatrix split =
        choi(compose(QubitChannel(c21), QubitChannel(c10)));

    GapPoint point;
    point.tau10 = tau10;
    point.tau21 = tau21;
    point.gap = trace_distance(direct, split);
    const cplx cc = c10 * c21;
    point.m_term = std::norm(c20) - std::norm(cc);
    point.n_term = std::norm(c20) + std::norm(cc);
    point.k_term = (c20 * std::conj(cc)).real();
    return point;
}

std::vector<double> gap_grid(const AmplitudeFn& cfun,
                             const std::vector<double>& taus) {
    return gap_grid_impl(cfun, taus, true);
}

std::vector<double> gap_grid_serial(const AmplitudeFn& cfun,
                                    const std::vector<double>& taus) {
    return gap_grid_impl(cfun, taus, false);
}

NmResult measure_nm(const AmplitudeFn& cfun, double horizon,
                    const NmOptions& options) {
    if (!(horizon > 0.0)) {
        throw std::invalid_argument("measure_nm: horizon must be > 0");
    }
    if (options.coarse_n < 32) {
        throw std::invalid_argument("measure_nm: coarse_n must be >= 32");
    }

    const std::vector<double> taus = tau_grid(horizon, options.coarse_n);
    const std::vector<double> gaps = gap_grid_impl(cfun, taus, options.parallel);

    NmResult result;
    result.grid_size = options.coarse_n;
    result.horizon = horizon;
    result.evaluations =
        static_cast<long>(taus.size()) * static_cast<long>(taus.size());

    // Deterministic argmax (row-major first hit wins ties).
    std::size_t best = 0;
    for (std::size_t idx = 1; idx < gaps.size(); ++idx) {
        if (gaps[idx] > gaps[best]) {
            best = idx;
        }
    }
    result.n_m = gaps[best];
    result.tau10_star = taus[best / taus.size()];
    result.tau21_star = taus[best % taus.size()];

    if (result.n_m < 1e-14 &&
        std::abs(fetch_amplitude(cfun, horizon)) > 0.9) {
        result.horizon_warning = true;
    }

    if (options.refine) {
        result.refined = true;
        long evals = 0;
        auto value = [&](double x, double y) {
            ++evals;
            const double cx = std::clamp(x, 0.0, horizon);
            const double cy = std::clamp(y, 0.0, horizon);
            const cplx c10 = fetch_amplitude(cfun, cx);
            const cplx c21 = fetch_amplitude(cfun, cy);
            const cplx c20 = fetch_amplitude(cfun, cx + cy);
            return gap_closed_complex(c20, c10, c21);
        };

        // Initial simplex: the best three grid cells, replaced by an
        // axis-aligned offset simplex when (nearly) degenerate.
        std::vector<std::size_t> order(gaps.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i] = i;
        }
        std::partial_sort(order.begin(), order.begin() + 3, order.end(),
                          [&](std::size_t a, std::size_t b) {
                              if (gaps[a] != gaps[b]) {
                                  return gaps[a] > gaps[b];
                              }
                              return a < b;
                          });
        std::array<SimplexVertex, 3> simplex;
        for (int v = 0; v < 3; ++v) {
            const std::size_t idx = order[v];
            simplex[v] = {taus[idx / taus.size()], taus[idx % taus.size()],
                          gaps[idx]};
        }
        const double span = horizon / options.coarse_n;
        const double area =
            std::abs((simplex[1].x - simplex[0].x) * (simplex[2].y - simplex[0].y) -
                     (simplex[2].x - simplex[0].x) * (simplex[1].y - simplex[0].y));
        if (area < 1e-12 * span * span) {
            simplex[1] = {simplex[0].x + span, simplex[0].y, 0.0};
            simplex[2] = {simplex[0].x, simplex[0].y + span, 0.0};
            simplex[1].value = value(simplex[1].x, simplex[1].y);
            simplex[2].value = value(simplex[2].x, simplex[2].y);
        }

        const double tol = options.simplex_tol * horizon;
        for (int it = 0; it < options.max_refine_iters; ++it) {
            std::sort(simplex.begin(), simplex.end(),
                      [](const SimplexVertex& a, const SimplexVertex& b) {
                          return a.value > b.value;
                      });
            const double diameter = std::max(
                {std::hypot(simplex[1].x - simplex[0].x,
                            simplex[1].y - simplex[0].y),
                 std::hypot(simplex[2].x - simplex[0].x,
                            simplex[2].y - simplex[0].y),
                 std::hypot(simplex[2].x - simplex[1].x,
                            simplex[2].y - simplex[1].y)});
            if (diameter < tol) {
                break;
            }
            const double cx = 0.5 * (simplex[0].x + simplex[1].x);
            const double cy = 0.5 * (simplex[0].y + simplex[1].y);
            SimplexVertex reflect{cx + (cx - simplex[2].x),
                                  cy + (cy - simplex[2].y), 0.0};
            reflect.value = value(reflect.x, reflect.y);
            if (reflect.value > simplex[0].value) {
                SimplexVertex expand{cx + 2.0 * (cx - simplex[2].x),
                                     cy + 2.0 * (cy - simplex[2].y), 0.0};
                expand.value = value(expand.x, expand.y);
                simplex[2] = expand.value > reflect.value ? expand : reflect;
            } else if (reflect.value > simplex[1].value) {
                simplex[2] = reflect;
            } else {
                SimplexVertex contract{cx + 0.5 * (simplex[2].x - cx),
                                       cy + 0.5 * (simplex[2].y - cy), 0.0};
                contract.value = value(contract.x, contract.y);
                if (contract.value > simplex[2].value) {
                    simplex[2] = contract;
                } else {
                    for (int v = 1; v < 3; ++v) {
                        simplex[v].x =
                            simplex[0].x + 0.5 * (simplex[v].x - simplex[0].x);
                        simplex[v].y =
                            simplex[0].y + 0.5 * (simplex[v].y - simplex[0].y);
                        simplex[v].value = value(simplex[v].x, simplex[v].y);
                    }
                }
            }
        }
        for (const SimplexVertex& v : simplex) {
            if (v.value > result.n_m) {
                result.n_m = v.value;
                result.tau10_star = std::clamp(v.x, 0.0, horizon);
                result.tau21_star = std::clamp(v.y, 0.0, horizon);
            }
        }
        result.evaluations += evals;
    }
    return result;
}

std::pair<DensityMatrix, DensityMatrix>
witness_evolutions(const AmplitudeFn& cfun, double t1, double t2,
                   const DensityMatrix& rho0) {
    if (!(0.0 <= t1) || !(t1 <= t2)) {
        throw std::invalid_argument("witness_evolutions: need 0 <= t1 <= t2");
    }
    rho0.validate();
    const DensityMatrix direct =
        apply(QubitChannel(fetch_amplitude(cfun, t2)), rho0);
    const DensityMatrix restarted =
        apply(QubitChannel(fetch_amplitude(cfun, t2 - t1)),
              apply(QubitChannel(fetch_amplitude(cfun, t1)), rho0));
    return {direct, restarted};
}

std::vector<ScanRecord> nm_scan(const std::vector<ScanPoint>& points,
                                const ScanOptions& options) {
    if (points.empty()) {
        throw std::invalid_argument("nm_scan: empty parameter list");
    }
    std::vector<ScanRecord> records(points.size());
    const auto n = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(dynamic) if (options.parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        ScanRecord rec;
        rec.parameter = points[i].parameter;
        try {
            ModelOptions model_options;
            model_options.horizon_override = options.horizon_override;
            model_options.step_override = options.step_override;
            model_options.parallel = !options.parallel;
            const AmplitudeModel model =
                make_amplitude_model(points[i].sd, model_options);
            NmOptions nm = options.nm;
            nm.parallel = !options.parallel;
            rec.result = measure_nm(model.cfun, model.horizon, nm);
        } catch (const std::exception& e) {
            rec.failed = true;
            rec.error = e.what();
        }
        records[i] = rec;
    }
    return records;
}

void write_scan_csv(const std::vector<ScanRecord>& records,
                    std::ostream& out) {
    auto g17 = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "parameter,n_m,tau10_star,tau21_star,evaluations\n";
    for (const ScanRecord& rec : records) {
        if (rec.failed) {
            out << "# parameter " << g17(rec.parameter)
                << " failed: " << rec.error << "\n";
            continue;
        }
        out << g17(rec.parameter) << ',' << g17(rec.result.n_m) << ','
            << g17(rec.result.tau10_star) << ',' << g17(rec.result.tau21_star)
            << ',' << rec.result.evaluations << "\n";
    }
}

std::string scan_to_json(const std::vector<ScanRecord>& records, int indent) {
    nlohmann::json points = nlohmann::json::array();
    for (const ScanRecord& rec : records) {
        nlohmann::json j;
        j["parameter"] = rec.parameter;
        if (rec.failed) {
            j["error"] = rec.error;
        } else {
            j["n_m"] = rec.result.n_m;
            j["tau10_star"] = rec.result.tau10_star;
            j["tau21_star"] = rec.result.tau21_star;
            j["grid_size"] = rec.result.grid_size;
            j["refined"] = rec.result.refined;
            j["horizon"] = rec.result.horizon;
            j["evaluations"] = rec.result.evaluations;
            j["horizon_warning"] = rec.result.horizon_warning;
        }
        points.push_back(j);
    }
    nlohmann::json root;
    root["points"] = points;
    return root.dump(indent) + "\n";
}

} // namespace memkit
