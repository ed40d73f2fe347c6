// Copyright (c) 2026 The memkit authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "memkit/spectral.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace memkit;

namespace {

SpectralDensity ohmic_unit(double alpha) {
    return SpectralDensity::ohmic(alpha, 1.0, 1.0);
}

} // namespace

TEST_CASE("density_at reference points") {
    const auto lor = SpectralDensity::lorentzian(1.0, 1.0, 5.0);
    CHECK(density_at(lor, 5.0) ==
          doctest::Approx(1.0 / (2.0 * pi)).epsilon(1e-14)); // peak value
    const auto ohm = ohmic_unit(1.0);
    CHECK(density_at(ohm, 0.0) == 0.0);
    CHECK(density_at(ohm, -2.0) == 0.0);
    const auto trunc = SpectralDensity::truncated_lorentzian(1.0, 1.0, 5.0);
    CHECK(density_at(trunc, -1.0) == 0.0);
    CHECK(density_at(trunc, 1.0) == density_at(lor, 1.0));
}

TEST_CASE("density_at is nonnegative for every kind") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> freq(-10.0, 50.0);
    const auto lor = SpectralDensity::lorentzian(0.7, 2.0, 3.0);
    const auto trunc = SpectralDensity::truncated_lorentzian(0.7, 2.0, 3.0);
    const auto ohm = SpectralDensity::ohmic(1.4, 2.0, 1.0);
    const auto tab = SpectralDensity::tabulated(
        {{0.0, 0.0}, {1.0, 0.5}, {2.0, 0.1}, {5.0, 0.7}}, 1.0);
    for (int i = 0; i < 500; ++i) {
        const double w = freq(rng);
        for (const auto* sd : {&lor, &trunc, &ohm, &tab}) {
            CHECK(density_at(*sd, w) >= 0.0);
        }
    }
}

TEST_CASE("tabulated spectra validate their invariants") {
    CHECK_THROWS_AS(SpectralDensity::tabulated({{1.0, 0.2}}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        SpectralDensity::tabulated({{1.0, 0.2}, {0.5, 0.1}}, 1.0),
        std::invalid_argument); // not ascending
    CHECK_THROWS_AS(
        SpectralDensity::tabulated({{0.5, -0.2}, {1.0, 0.1}}, 1.0),
        std::invalid_argument); // negative J
    CHECK_THROWS_AS(
        SpectralDensity::tabulated({{-0.5, 0.2}, {1.0, 0.1}}, 1.0),
        std::invalid_argument); // negative frequency
    CHECK_THROWS_AS(SpectralDensity::lorentzian(0.0, 1.0, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(SpectralDensity::ohmic(1.0, -2.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("tabulated CSV loader handles units and comments") {
    const double omega0 = 4.0;
    std::istringstream relative("# spectral table\n0.5, 0.25\n1.0, 0.5\n"
                                "1.5, 0.25\n");
    const auto rel = load_tabulated_csv(relative, omega0);
    CHECK(rel.table().front().omega == doctest::Approx(0.5 * omega0));
    CHECK(density_at(rel, omega0) == doctest::Approx(0.5));

    std::istringstream absolute(
        "# units=absolute\n0.5 0.25\n1.0 0.5\n1.5 0.25\n");
    const auto abs = load_tabulated_csv(absolute, omega0);
    CHECK(abs.table().front().omega == doctest::Approx(0.5));

    std::istringstream bad("0.5, oops\n");
    CHECK_THROWS_AS(load_tabulated_csv(bad, omega0), std::invalid_argument);
}

TEST_CASE("Lorentzian kernel closed form") {
    const auto sd = SpectralDensity::lorentzian(1.0, 2.0, 1.0);
    CHECK(correlation_kernel(sd, 0.0).real() == doctest::Approx(1.0));
    CHECK(correlation_kernel(sd, 0.0).imag() == 0.0);
    // f(1) = (gamma0 lambda/2) e^{-lambda} = e^{-2}
    CHECK(correlation_kernel(sd, 1.0).real() ==
          doctest::Approx(0.1353352832366127).epsilon(1e-12));
    CHECK_THROWS_AS(correlation_kernel(sd, -0.5), std::domain_error);
}

TEST_CASE("Lorentzian kernel matches defining-integral quadrature") {
    // Wide-window oracle: J_L(w) e^{i(w0-w)tau} integrated over
    // [w0 - W, w0 + W]; the truncated tail is oscillation-suppressed for
    // tau >= 0.5/lambda. Relative error is measured against f(0).
    const double g0 = 0.8;
    const double l = 1.6;
    const auto sd = SpectralDensity::lorentzian(g0, l, 3.0);
    const double scale = 0.5 * g0 * l;
    const long double w_span = 3000.0L * l;
    for (double tau : {0.5 / l, 1.0 / l, 3.7 / l, 10.0 / l}) {
        const auto ref = oracle::integrate(
            [&](long double s) {
                const long double den = s * s + (long double)(l) * l;
                const long double amp =
                    (long double)(g0) * l * l / (2.0L * 3.14159265358979323846L);
                return amp / den *
                       std::complex<long double>(cosl(-s * tau), sinl(-s * tau));
            },
            -w_span, w_span, 80000);
        const cplx got = correlation_kernel(sd, tau);
        CHECK(std::abs(got - cplx(static_cast<double>(ref.real()),
                                  static_cast<double>(ref.imag()))) <=
              1e-6 * scale);
    }
}

TEST_CASE("Ohmic kernel against its closed form") {
    // int_0^inf a w e^{-w/wc} e^{i(w0-w)t} dw
    //   = a wc^2 e^{i w0 t} / (1 + i wc t)^2, an independent check of the
    // oscillatory panel quadrature.
    const double alpha = 0.8;
    const double wc = 1.3;
    const double w0 = 2.0;
    const auto sd = SpectralDensity::ohmic(alpha, wc, w0);
    CHECK(correlation_kernel(sd, 0.0).real() ==
          doctest::Approx(alpha * wc * wc).epsilon(1e-8));
    for (double tau : {0.0, 0.3, 0.7, 2.5, 20.0}) {
        const cplx den(1.0, wc * tau);
        const cplx expect =
            alpha * wc * wc / (den * den) * std::exp(cplx(0.0, w0 * tau));
        const cplx got = correlation_kernel(sd, tau);
        CHECK(std::abs(got - expect) <= 1e-8 * alpha * wc * wc);
    }
    // Frozen spot value (long-double oracle).
    const cplx frozen = correlation_kernel(sd, 0.7);
    CHECK(frozen.real() == doctest::Approx(0.73739558368735493).epsilon(1e-9));
    CHECK(frozen.imag() ==
          doctest::Approx(-0.056613888112785405).epsilon(1e-7));
}

TEST_CASE("Truncated-Lorentzian kernel") {
    // lambda/omega0 = 1: f'(0) = mass = (g0 l/2)(1/2 + atan(w0/l)/pi) = 0.375.
    const auto sd = SpectralDensity::truncated_lorentzian(1.0, 1.0, 1.0);
    const cplx at_zero = correlation_kernel(sd, 0.0);
    CHECK(at_zero.real() == doctest::Approx(0.375).epsilon(1e-8));
    CHECK(std::abs(at_zero.imag()) <= 1e-10);

    // Frozen wide-window oracle values (GL-20 long double, W = 4e5 l).
    const cplx at_half = correlation_kernel(sd, 0.5);
    CHECK(at_half.real() == doctest::Approx(0.27241222746537).epsilon(1e-6));
    CHECK(at_half.imag() ==
          doctest::Approx(-0.0682916374270155).epsilon(1e-6));
    const cplx at_two = correlation_kernel(sd, 2.0);
    CHECK(at_two.real() == doctest::Approx(0.102032090499609).epsilon(1e-6));
    CHECK(at_two.imag() ==
          doctest::Approx(-0.000521870218533604).epsilon(1e-4));

    // Narrow peak (lambda/omega0 = 0.01): exact mass at tau = 0 and decay
    // towards the full-line kernel.
    const auto narrow = SpectralDensity::truncated_lorentzian(1.0, 1.0, 100.0);
    const double mass = 0.5 * (0.5 + std::atan(100.0) / pi);
    CHECK(correlation_kernel(narrow, 0.0).real() ==
          doctest::Approx(mass).epsilon(1e-9));
    const auto full = SpectralDensity::lorentzian(1.0, 1.0, 100.0);
    for (double tau : {0.5, 2.0, 5.0}) {
        CHECK(std::abs(correlation_kernel(narrow, tau) -
                       correlation_kernel(full, tau)) <= 4e-3 * 0.5);
    }
}

TEST_CASE("self-energy reference values and scaling") {
    const auto sd = ohmic_unit(2.0);
    CHECK(self_energy(sd, 1.0) ==
          doctest::Approx(-0.60565023352986786).epsilon(1e-12));
    // w -> 0- limit: Sigma -> -alpha wc.
    CHECK(self_energy(sd, -1e-9) == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK_THROWS_AS(self_energy(sd, 0.0), std::domain_error);
    CHECK_THROWS_AS(
        self_energy(SpectralDensity::lorentzian(1.0, 1.0, 1.0), 1.0),
        std::invalid_argument);

    const auto half = ohmic_unit(1.0);
    for (double w : {-3.0, -0.4, 0.7, 2.0}) {
        CHECK(self_energy(sd, w) ==
              doctest::Approx(2.0 * self_energy(half, w)).epsilon(1e-13));
    }
    // Stable far outside the cutoff.
    CHECK(std::isfinite(self_energy(sd, -2000.0)));
    CHECK(std::isfinite(self_energy(sd, 500.0)));
}

TEST_CASE("analytic self-energy derivative matches finite differences") {
    const auto sd = ohmic_unit(1.7);
    for (double w : {-5.0, -1.0, -0.1, 0.3, 1.0, 3.0, 10.0}) {
        const double h = 1e-5 * std::abs(w);
        const double numeric = oracle::central_diff(
            [&](double x) { return self_energy(sd, x); }, w, h);
        const double analytic = self_energy_deriv(sd, w);
        CHECK(std::abs(analytic - numeric) <=
              1e-6 * std::max(1.0, std::abs(analytic)));
    }
}

TEST_CASE("bound state appears exactly above threshold") {
    CHECK(!bound_state(ohmic_unit(0.5)).has_value());
    CHECK(!bound_state(ohmic_unit(1.0)).has_value()); // equality: absent

    const auto present = bound_state(ohmic_unit(2.0));
    REQUIRE(present.has_value());
    CHECK(present->omega_prime < 0.0);
    const auto sd = ohmic_unit(2.0);
    const double residual = present->omega_prime - sd.omega0() -
                            self_energy(sd, present->omega_prime);
    CHECK(std::abs(residual) <= 1e-10);
    CHECK(present->z_weight > 0.0);
    CHECK(present->z_weight <= 1.0);

    for (double alpha : {0.2, 0.9, 1.5, 3.0, 10.0, 100.0}) {
        for (double wc : {0.5, 1.0, 2.0}) {
            for (double w0 : {0.5, 1.0, 2.0}) {
                const auto s = SpectralDensity::ohmic(alpha, wc, w0);
                const auto b = bound_state(s);
                CHECK(b.has_value() == (alpha * wc > w0));
                if (b) {
                    CHECK(b->omega_prime < 0.0);
                    CHECK(b->z_weight > 0.0);
                    CHECK(b->z_weight <= 1.0);
                    CHECK(std::abs(b->omega_prime - w0 -
                                   self_energy(s, b->omega_prime)) <= 1e-10 *
                          std::max(w0, alpha * wc));
                }
            }
        }
    }
}

TEST_CASE("kernel grid matches pointwise kernel") {
    const auto trunc = SpectralDensity::truncated_lorentzian(1.0, 1.0, 1.0);
    const auto grid = correlation_kernel_grid(trunc, 0.05, 200);
    for (std::size_t k : {std::size_t{1}, std::size_t{57}, std::size_t{199}}) {
        const cplx ref = correlation_kernel(trunc, 0.05 * k);
        CHECK(std::abs(grid[k] - ref) <= 1e-8);
    }
    const auto ohm = SpectralDensity::ohmic(0.5, 1.0, 1.0);
    const auto ogrid = correlation_kernel_grid(ohm, 0.1, 100);
    for (std::size_t k : {std::size_t{1}, std::size_t{42}, std::size_t{99}}) {
        const cplx ref = correlation_kernel(ohm, 0.1 * k);
        CHECK(std::abs(ogrid[k] - ref) <= 1e-8);
    }
}
