// Copyright (c) 2026 The memkit authors
// SPDX-License-Identifier: Apache-2.0

// Serial reference vs OpenMP kernels on representative workloads.

#include "memkit/nonmarkov.hpp"
#include "memkit/quadrature.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using namespace memkit;

namespace {

struct PhaseFixture {
    std::vector<double> omega;
    std::vector<cplx> amp;
    std::size_t nt = 4096;

    PhaseFixture() {
        std::mt19937 rng(1234);
        std::uniform_real_distribution<double> freq(0.0, 40.0);
        std::normal_distribution<double> gauss(0.0, 1.0);
        omega.resize(20000);
        amp.resize(omega.size());
        for (std::size_t i = 0; i < omega.size(); ++i) {
            omega[i] = freq(rng);
            amp[i] = cplx(gauss(rng), gauss(rng));
        }
    }
};

const PhaseFixture& phase_fixture() {
    static const PhaseFixture fixture;
    return fixture;
}

void bm_phase_sum_serial(benchmark::State& state) {
    const auto& f = phase_fixture();
    for (auto _ : state) {
        auto out = phase_sum_batch_serial(f.omega, f.amp, 0.0, 0.01, f.nt, -1.0);
        benchmark::DoNotOptimize(out.data());
    }
}

void bm_phase_sum_parallel(benchmark::State& state) {
    const auto& f = phase_fixture();
    for (auto _ : state) {
        auto out = phase_sum_batch(f.omega, f.amp, 0.0, 0.01, f.nt, -1.0);
        benchmark::DoNotOptimize(out.data());
    }
}

void bm_volterra_serial(benchmark::State& state) {
    const auto sd = SpectralDensity::truncated_lorentzian(1.0, 1.0, 1.0);
    for (auto _ : state) {
        auto trace = volterra_solve_serial(sd, 40.0, 40.0 / 12000.0);
        benchmark::DoNotOptimize(trace.values.data());
    }
}

void bm_volterra_parallel(benchmark::State& state) {
    const auto sd = SpectralDensity::truncated_lorentzian(1.0, 1.0, 1.0);
    for (auto _ : state) {
        auto trace = volterra_solve(sd, 40.0, 40.0 / 12000.0);
        benchmark::DoNotOptimize(trace.values.data());
    }
}

std::vector<double> gap_taus() {
    std::vector<double> taus;
    for (int i = 0; i < 192; ++i) {
        taus.push_back(18.0 * i / 191.0);
    }
    return taus;
}

void bm_gap_grid_serial(benchmark::State& state) {
    const AmplitudeFn cfun = [](double t) {
        return lorentzian_amplitude(2.0, 1.0, t);
    };
    const auto taus = gap_taus();
    for (auto _ : state) {
        auto gaps = gap_grid_serial(cfun, taus);
        benchmark::DoNotOptimize(gaps.data());
    }
}

void bm_gap_grid_parallel(benchmark::State& state) {
    const AmplitudeFn cfun = [](double t) {
        return lorentzian_amplitude(2.0, 1.0, t);
    };
    const auto taus = gap_taus();
    for (auto _ : state) {
        auto gaps = gap_grid(cfun, taus);
        benchmark::DoNotOptimize(gaps.data());
    }
}

void bm_ohmic_trace_serial(benchmark::State& state) {
    const auto sd = SpectralDensity::ohmic(1.5, 1.0, 1.0);
    const OhmicAmplitude oa(sd, 100.0);
    for (auto _ : state) {
        auto trace = oa.trace_serial(100.0, 0.05);
        benchmark::DoNotOptimize(trace.values.data());
    }
}

void bm_ohmic_trace_parallel(benchmark::State& state) {
    const auto sd = SpectralDensity::ohmic(1.5, 1.0, 1.0);
    const OhmicAmplitude oa(sd, 100.0);
    for (auto _ : state) {
        auto trace = oa.trace(100.0, 0.05);
        benchmark::DoNotOptimize(trace.values.data());
    }
}

} // namespace

BENCHMARK(bm_phase_sum_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_phase_sum_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_volterra_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_volterra_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_gap_grid_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_gap_grid_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_ohmic_trace_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_ohmic_trace_parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
