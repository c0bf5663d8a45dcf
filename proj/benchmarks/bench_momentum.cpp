#include <benchmark/benchmark.h>

#include "adiawkb/actions.hpp"
#include "adiawkb/band.hpp"
#include "adiawkb/momentum.hpp"

using namespace adiawkb;

namespace {
const PeriodicPotential& vc() {
    static const PeriodicPotential v = PeriodicPotential::cosine();
    return v;
}
const BandStructure& bands() {
    static const BandStructure bs = band_edges(vc(), 60.0);
    return bs;
}
} // namespace

static void BM_KappaContinuation(benchmark::State& state) {
    MomentumContext ctx(vc(), bands(), 0.3);
    const Complex target(0.9, 0.8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ctx.kappa(MomentumBranchTag::kappa0, target));
    }
}
BENCHMARK(BM_KappaContinuation)->Unit(benchmark::kMillisecond);

static void BM_GFactors(benchmark::State& state) {
    MomentumContext ctx(vc(), bands(), 0.3);
    const Complex cal_e(0.5 * (bands().edge(1) + bands().edge(2)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(g_pm(ctx, cal_e));
    }
}
BENCHMARK(BM_GFactors)->Unit(benchmark::kMillisecond);

static void BM_PhasePhi1(benchmark::State& state) {
    MomentumContext ctx(vc(), bands(), 0.3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(phase_phi1(ctx, 0.1));
    }
}
BENCHMARK(BM_PhasePhi1)->Unit(benchmark::kMillisecond);
