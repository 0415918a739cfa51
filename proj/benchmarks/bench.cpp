#include "openbook/experiments.hpp"

#include <benchmark/benchmark.h>

using namespace openbook;

static void BM_AssembleStar(benchmark::State& state)
{
    const auto book = truncate_book(books::star(3, 1.0), 20.0);
    const double h = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) {
        auto mesh = mesh_book(book, h, {}, StiffnessSplit::Keep);
        benchmark::DoNotOptimize(mesh.ops.stiffness.nonZeros());
    }
}
BENCHMARK(BM_AssembleStar)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_LineGroundState(benchmark::State& state)
{
    ExperimentOptions options;
    options.h = 1.0 / static_cast<double>(state.range(0));
    const Params params{1.0, 3.0, std::nullopt};
    for (auto _ : state) {
        auto gs = graph_ground_state(graphs::truncated_line(40.0), params, options);
        benchmark::DoNotOptimize(gs.level());
    }
}
BENCHMARK(BM_LineGroundState)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_SpectralBottom(benchmark::State& state)
{
    const auto mesh = mesh_book(books::torus(1.0, 1.0), 1.0 / static_cast<double>(state.range(0)));
    for (auto _ : state) {
        auto pairs = spectral_bottom(mesh.ops, 4);
        benchmark::DoNotOptimize(pairs.back().value);
    }
}
BENCHMARK(BM_SpectralBottom)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_ProductSweepPoint(benchmark::State& state)
{
    ExperimentOptions options;
    options.h = 0.2;
    const Params params{1.0, 3.0, std::nullopt};
    const double width = static_cast<double>(state.range(0)) / 10.0;
    for (auto _ : state) {
        auto result = sweep_widths(graphs::truncated_line(20.0), params, {width}, options);
        benchmark::DoNotOptimize(result.records.front().level);
    }
}
BENCHMARK(BM_ProductSweepPoint)->Arg(10)->Arg(25)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
