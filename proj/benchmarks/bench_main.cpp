#include "ferrospin/exact.hpp"
#include "ferrospin/harness.hpp"
#include "ferrospin/potential.hpp"
#include "ferrospin/regions.hpp"
#include "ferrospin/samplers.hpp"
#include "ferrospin/sawtree.hpp"

#include <benchmark/benchmark.h>

using namespace ferrospin;

namespace {

TwoSpinSystem grid_like(std::size_t n, std::uint64_t seed) {
    RandomSource rng(seed);
    return random_system(n, random_connected_graph(n, 4.0 / static_cast<double>(n), rng), 2.0, rng);
}

} // namespace

static void BM_GlauberStep(benchmark::State& state) {
    const auto s = grid_like(static_cast<std::size_t>(state.range(0)), 1);
    ChainState st{Configuration(s.size(), 1), 0};
    RandomSource rng(2);
    for (auto _ : state) {
        glauber_step(s, st, rng);
        benchmark::DoNotOptimize(st.config.data());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_GlauberStep)->Arg(100)->Arg(10000);

static void BM_CoupledScanStep(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    RandomSource rng(3);
    const auto s = random_system(2 * n, random_bipartite_graph(n, n, 4.0 / static_cast<double>(n), rng), 2.0, rng);
    const auto sched = UpdateSchedule::alternating_scan(*two_coloring(s));
    CoupledPair pair{Configuration(2 * n, 1), Configuration(2 * n, 0)};
    std::vector<double> r(sched.draws_per_step(2 * n));
    for (auto _ : state) {
        for (auto& x : r) x = rng.uniform();
        monotone_coupled_step(s, sched, pair, r);
    }
}
BENCHMARK(BM_CoupledScanStep)->Arg(50)->Arg(500);

static void BM_GibbsTable(benchmark::State& state) {
    const auto s = grid_like(static_cast<std::size_t>(state.range(0)), 4);
    for (auto _ : state) benchmark::DoNotOptimize(gibbs_distribution(s).log_partition);
}
BENCHMARK(BM_GibbsTable)->Arg(10)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_GlauberSpectrum(benchmark::State& state) {
    const auto s = grid_like(static_cast<std::size_t>(state.range(0)), 5);
    const auto mu = gibbs_distribution(s).prob;
    for (auto _ : state) {
        benchmark::DoNotOptimize(spectral_report(glauber_matrix(s), mu, ChainKind::Reversible).spectral_gap);
    }
}
BENCHMARK(BM_GlauberSpectrum)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_SawMarginal(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    const auto s = uniform_system(n, complete_graph(n), 0.9, 2.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(saw_marginal(s, 0, {{1, 1}}).p1);
}
BENCHMARK(BM_SawMarginal)->DenseRange(5, 8)->Unit(benchmark::kMillisecond);

static void BM_RegionConstruction(benchmark::State& state) {
    const auto s = grid_like(static_cast<std::size_t>(state.range(0)), 6);
    for (auto _ : state) benchmark::DoNotOptimize(construct_region(s, 0, {3, 12}).members.size());
}
BENCHMARK(BM_RegionConstruction)->Arg(200)->Arg(2000);

static void BM_BigPhi(benchmark::State& state) {
    const auto pp = derive_potential({0.8, 3.0, 0.9 * lambda_c(0.8, 3.0)});
    for (auto _ : state) benchmark::DoNotOptimize(big_phi(pp, 0.7 * pp.lambda));
}
BENCHMARK(BM_BigPhi);
BENCHMARK_MAIN();
