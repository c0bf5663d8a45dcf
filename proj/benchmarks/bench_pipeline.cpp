#include <benchmark/benchmark.h>

#include "adiawkb/band.hpp"
#include "adiawkb/cocycle.hpp"
#include "adiawkb/monodromy.hpp"

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
const MonodromyModel& model() {
    static const MonodromyModel m = [] {
        MomentumContext ctx(vc(), bands(), 0.3);
        return assemble_model(compute_actions(ctx, 2.0 * pi / 30.0, 0.05, false));
    }();
    return m;
}
} // namespace

// the hot path of the oracle runs: one exact monodromy integration
static void BM_ExactMonodromy(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            exact_monodromy(vc(), 0.3, 2.0 * pi / 30.0, 0.25));
    }
}
BENCHMARK(BM_ExactMonodromy)->Unit(benchmark::kMillisecond);

static void BM_ModelCocycleIteration(benchmark::State& state) {
    const MonodromyModel& m = model();
    MatrixCocycle mc{[&m](double phi) { return m.eval(phi); }, 0.618};
    for (auto _ : state) {
        benchmark::DoNotOptimize(iterate(mc, 0.0, 10000));
    }
}
BENCHMARK(BM_ModelCocycleIteration)->Unit(benchmark::kMillisecond);

static void BM_GapCertificate(benchmark::State& state) {
    const MonodromyModel& m = model();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            gap_certificate([&](double phi) { return m.eval(phi); }, 0.0, 1024));
    }
}
BENCHMARK(BM_GapCertificate)->Unit(benchmark::kMillisecond);
