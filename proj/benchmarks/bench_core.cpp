#include "choquard/model.hpp"
#include "choquard/riesz.hpp"
#include "choquard/solver.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <map>

using namespace choquard;

namespace {

const DimensionPair d3(3, 2.0);

GridPtr grid(std::size_t cells) {
    GridSpec gs;
    gs.cells = cells;
    gs.radius = 40.0;
    return RadialGrid::make(3, gs);
}

const RieszOperator& cached_operator(std::size_t cells) {
    static std::map<std::size_t, RieszOperator> ops;
    auto it = ops.find(cells);
    if (it == ops.end()) it = ops.emplace(cells, RieszOperator::build(d3, grid(cells))).first;
    return it->second;
}

void BM_KernelBuild(benchmark::State& state) {
    const auto g = grid(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(RieszOperator::build(d3, g).weighted().data());
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KernelBuild)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNSquared);

void BM_RieszApply(benchmark::State& state) {
    const auto& op = cached_operator(static_cast<std::size_t>(state.range(0)));
    const auto v = RadialFunction::sample(op.grid_ptr(), [](double r) { return std::exp(-r * r); });
    for (auto _ : state) benchmark::DoNotOptimize(op.apply(v).values().data());
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RieszApply)->Arg(512)->Arg(1024)->Arg(2048)->Complexity(benchmark::oNSquared);

void BM_EnergyEvaluation(benchmark::State& state) {
    const auto& op = cached_operator(static_cast<std::size_t>(state.range(0)));
    const ProblemParams pp(d3, 1.0, 1.0, 5.0, PowerNonlinearity{1.0, 4.0});
    const auto u = RadialFunction::sample(op.grid_ptr(), [](double r) { return std::exp(-0.5 * r * r); });
    for (auto _ : state) benchmark::DoNotOptimize(energy_breakdown(pp, op, u).energy);
}
BENCHMARK(BM_EnergyEvaluation)->Arg(512)->Arg(2048);

void BM_ShiftedSolve(benchmark::State& state) {
    const auto g = grid(static_cast<std::size_t>(state.range(0)));
    const std::vector<double> rhs(g->size(), 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(g->solve_shifted(1.0, rhs).data());
}
BENCHMARK(BM_ShiftedSolve)->Arg(2048)->Arg(8192);

void BM_SubcriticalSolve(benchmark::State& state) {
    const auto& op = cached_operator(512);
    const ProblemParams pp(d3, 1.0, 1.0, 4.0, PowerNonlinearity{1.0, 4.0});
    for (auto _ : state) benchmark::DoNotOptimize(minimize(pp, op, initial_guess(op.grid_ptr(), 1), SolveOptions{}).m_p);
}
BENCHMARK(BM_SubcriticalSolve)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
