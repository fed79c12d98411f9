#include <benchmark/benchmark.h>

#include "maxstab/coupling.hpp"
#include "maxstab/pruning.hpp"

using namespace maxstab;

namespace {

const CensorSet& fat_cantor() {
    static const CensorSet e = make_cantor(alpha_schedule(3.0, 18));
    return e;
}

void BM_FractionReference(benchmark::State& st) {
    const TimeGrid g(0.0, 1.0, static_cast<int>(st.range(0)));
    MatchConfig cfg;
    for (auto _ : st) benchmark::DoNotOptimize(fraction_counts_reference(fat_cantor(), g, cfg, 64, 1));
    st.SetItemsProcessed(st.iterations() * 64);
}

void BM_FractionFused(benchmark::State& st, Exec exec) {
    const TimeGrid g(0.0, 1.0, static_cast<int>(st.range(0)));
    MatchConfig cfg;
    const CellSplit split = split_cells(fat_cantor(), g, cfg.theta_mem);
    for (auto _ : st) benchmark::DoNotOptimize(fraction_counts(split, cfg, 64, 1, exec));
    st.SetItemsProcessed(st.iterations() * 64);
}

void BM_Pruning(benchmark::State& st, Exec exec) {
    const PruningPreset pr = shipped_preset();
    std::vector<OccupancyProfile> pop(64);
    for (int i = 0; i < 64; ++i) pop[i].points = {(i + 0.5) / 64.0};
    for (auto _ : st) benchmark::DoNotOptimize(run_pruning(pop, pr, 500, 1, exec));
    st.SetItemsProcessed(st.iterations() * 500);
}

}  // namespace

BENCHMARK(BM_FractionReference)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_FractionFused, serial, Exec::Serial)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_FractionFused, parallel, Exec::Parallel)->Arg(10)->Arg(12)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Pruning, serial, Exec::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Pruning, parallel, Exec::Parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
