#include "qprog/costs.hpp"
#include "qprog/optim.hpp"
#include "qprog/processors.hpp"
#include "qprog/random.hpp"
#include "qprog/sdp.hpp"

#include <benchmark/benchmark.h>

using namespace qprog;

static void BM_PbtApply(benchmark::State& state) {
    const auto n = static_cast<Index>(state.range(0));
    const auto proc = pbt_processor(n, 2);
    Rng rng(1);
    const CMatrix pi = random_state(proc.program_dim(), rng).matrix();
    for (auto _ : state) benchmark::DoNotOptimize(proc.apply(pi));
}
BENCHMARK(BM_PbtApply)->DenseRange(1, 4);

static void BM_PbtDual(benchmark::State& state) {
    const auto n = static_cast<Index>(state.range(0));
    const auto proc = pbt_processor(n, 2);
    Rng rng(2);
    const CMatrix y = random_hermitian(proc.choi_dim(), rng);
    for (auto _ : state) benchmark::DoNotOptimize(proc.dual(y));
}
BENCHMARK(BM_PbtDual)->DenseRange(1, 4);

static void BM_PqcApply(benchmark::State& state) {
    const auto proc = pqc_processor(pqc_default_gates(state.range(0)));
    Rng rng(3);
    const CMatrix pi = random_state(proc.program_dim(), rng).matrix();
    for (auto _ : state) benchmark::DoNotOptimize(proc.apply(pi));
}
BENCHMARK(BM_PqcApply)->DenseRange(2, 6, 2);

static void BM_DiamondQubit(benchmark::State& state) {
    Rng rng(4);
    const CMatrix diff = random_choi(2, 2, rng).matrix() - random_choi(2, 2, rng).matrix();
    for (auto _ : state) benchmark::DoNotOptimize(diamond_distance(diff, 2).objective);
}
BENCHMARK(BM_DiamondQubit)->Unit(benchmark::kMillisecond);

static void BM_DiamondQutrit(benchmark::State& state) {
    Rng rng(5);
    const CMatrix diff = random_choi(3, 3, rng).matrix() - random_choi(3, 3, rng).matrix();
    for (auto _ : state) benchmark::DoNotOptimize(diamond_distance(diff, 3).objective);
}
BENCHMARK(BM_DiamondQutrit)->Unit(benchmark::kMillisecond);

static void BM_ProjectStates(benchmark::State& state) {
    Rng rng(6);
    const CMatrix x = random_hermitian(state.range(0), rng);
    for (auto _ : state) benchmark::DoNotOptimize(project_to_states(x));
}
BENCHMARK(BM_ProjectStates)->RangeMultiplier(2)->Range(4, 64);

static void BM_ProjectChoiSet(benchmark::State& state) {
    Rng rng(7);
    const CMatrix x = 0.3 * random_hermitian(4, rng) + CMatrix::Identity(4, 4) / 4.0;
    for (auto _ : state) benchmark::DoNotOptimize(project_to_choi_set(x, 2));
}
BENCHMARK(BM_ProjectChoiSet);

static void BM_SubgradientStep(benchmark::State& state) {
    const auto proc = pbt_processor(2, 2);
    const auto cost = trace_cost(proc, choi_from_kraus(channels::amplitude_damping(0.3)));
    OptimizerConfig cfg;
    cfg.iterations = 100;
    for (auto _ : state)
        benchmark::DoNotOptimize(projected_subgradient(cost, DensityOperator::maximally_mixed(16), cfg).best_cost);
    state.SetItemsProcessed(state.iterations() * cfg.iterations);
}
BENCHMARK(BM_SubgradientStep)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
