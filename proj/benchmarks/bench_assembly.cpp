#include <benchmark/benchmark.h>

#include "nlrs/nonlocal_op.hpp"
#include "nlrs/solver.hpp"

using namespace nlrs;

static void BM_RegionalAssembly1D(benchmark::State& state) {
    const Grid g = make_grid(1, 10.0, static_cast<std::size_t>(state.range(0)));
    const auto scope = constant_scope(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(assemble_regional_form(g, scope, 0.4));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RegionalAssembly1D)->RangeMultiplier(2)->Range(201, 3201)->Complexity();

static void BM_RegionalAssembly2D(benchmark::State& state) {
    const Grid g = make_grid(2, 5.0, static_cast<std::size_t>(state.range(0)));
    const auto scope = constant_scope(1.0);
    for (auto _ : state) benchmark::DoNotOptimize(assemble_regional_form(g, scope, 0.4));
}
BENCHMARK(BM_RegionalAssembly2D)->Arg(41)->Arg(81);

static void BM_FullAssembly1D(benchmark::State& state) {
    const Grid g = make_grid(1, 20.0, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(assemble_full_form(g, 0.4, true));
}
BENCHMARK(BM_FullAssembly1D)->Arg(401)->Arg(801);

static void BM_ApplyForm(benchmark::State& state) {
    const Grid g = make_grid(1, 20.0, static_cast<std::size_t>(state.range(0)));
    const auto A = assemble_full_form(g, 0.4, true);
    std::vector<double> u(g.size(), 1.0), out(g.size());
    for (auto _ : state) {
        apply_form(A, u, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_ApplyForm)->Arg(401)->Arg(801)->Arg(1601);

static void BM_GroundState(benchmark::State& state) {
    const ConstCoeffProblem prob{1.0, 1.0, 0.4, 2.0, 1, make_grid(1, 20.0, static_cast<std::size_t>(state.range(0)))};
    const auto A = assemble_problem_form(prob);
    const auto model = make_model(prob);
    for (auto _ : state) benchmark::DoNotOptimize(solve_ground_state(model, A, SolverOptions{}).level);
}
BENCHMARK(BM_GroundState)->Arg(201)->Arg(401)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
