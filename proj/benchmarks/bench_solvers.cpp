#include "pfc/harness.hpp"
#include "pfc/sensitivity.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace pfc;

Instance square(int n, int steps) {
    InstanceRecipe r;
    r.dimension = Dimension::rectangle;
    r.lengths = {1.0, 1.0};
    r.node_counts = {n, n};
    r.steps = steps;
    return make_instance(r, 1);
}

Instance interval(int n, int steps) {
    InstanceRecipe r;
    r.node_counts = {n};
    r.steps = steps;
    return make_instance(r, 1);
}

void BM_StateInterval(benchmark::State& s) {
    const auto in = interval(static_cast<int>(s.range(0)), 64);
    const auto pb = in.problem();
    for (auto _ : s) benchmark::DoNotOptimize(pb.solve(in.control));
}
BENCHMARK(BM_StateInterval)->Arg(17)->Arg(65);

void BM_StateSquare(benchmark::State& s) {
    const auto in = square(static_cast<int>(s.range(0)), 32);
    const auto pb = in.problem();
    for (auto _ : s) benchmark::DoNotOptimize(pb.solve(in.control));
}
BENCHMARK(BM_StateSquare)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);

void BM_Gradient(benchmark::State& s) {
    const auto in = square(17, 32);
    const auto pb = in.problem();
    for (auto _ : s) benchmark::DoNotOptimize(pb.evaluate(in.control, in.cost));
}
BENCHMARK(BM_Gradient)->Unit(benchmark::kMillisecond);

void BM_Linearized(benchmark::State& s) {
    const auto in = square(17, 32);
    const auto st = in.problem().solve(in.control);
    const auto h = random_direction(in.grid, in.tgrid, 2);
    for (auto _ : s) benchmark::DoNotOptimize(solve_linearized(st, in.grid, in.tgrid, in.params, in.potential, h));
}
BENCHMARK(BM_Linearized)->Unit(benchmark::kMillisecond);

void BM_Regularized(benchmark::State& s) {
    auto in = interval(65, 64);
    in.regularization = Regularization{0.05};
    const auto pb = in.problem();
    for (auto _ : s) benchmark::DoNotOptimize(pb.solve(in.control));
}
BENCHMARK(BM_Regularized);

}  // namespace

BENCHMARK_MAIN();
