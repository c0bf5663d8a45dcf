#include <benchmark/benchmark.h>

#include "adiawkb/band.hpp"
#include "adiawkb/transfer.hpp"

using namespace adiawkb;

static void BM_TransferOverPeriod(benchmark::State& state) {
    const PeriodicPotential V = PeriodicPotential::cosine();
    const Complex E(0.5, 0.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(transfer_over_period(V, E));
    }
}
BENCHMARK(BM_TransferOverPeriod);

static void BM_DiscriminantWithDerivative(benchmark::State& state) {
    const PeriodicPotential V = PeriodicPotential::cosine();
    const Complex E(0.5, 0.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(discriminant_with_derivative(V, E));
    }
}
BENCHMARK(BM_DiscriminantWithDerivative);

static void BM_BandEdges(benchmark::State& state) {
    const PeriodicPotential V = PeriodicPotential::cosine();
    for (auto _ : state) {
        benchmark::DoNotOptimize(band_edges(V, 60.0));
    }
}
BENCHMARK(BM_BandEdges)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
