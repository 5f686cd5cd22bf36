#include <benchmark/benchmark.h>

#include "fraceig/cylinder.hpp"
#include "fraceig/solve.hpp"
#include "fraceig/spectral_operator.hpp"
#include "fraceig/weight.hpp"

using namespace fraceig;

static void BM_build_operator_1d(benchmark::State& state) {
    const Grid grid = build_grid(1, state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(build_operator(grid));
}
BENCHMARK(BM_build_operator_1d)->Arg(31)->Arg(63)->Arg(127);

static void BM_build_operator_2d(benchmark::State& state) {
    const Grid grid = build_grid(2, state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(build_operator(grid));
}
BENCHMARK(BM_build_operator_2d)->Arg(15)->Arg(23)->Arg(31);

static void BM_half_solve(benchmark::State& state) {
    const SpectralOperator op = build_operator(build_grid(2, state.range(0)));
    const Eigen::VectorXd rhs = Eigen::VectorXd::Ones(op.grid.num_nodes());
    for (auto _ : state)
        benchmark::DoNotOptimize(half_solve(op, rhs));
}
BENCHMARK(BM_half_solve)->Arg(15)->Arg(31);

static void BM_monotone_solve(benchmark::State& state) {
    const SpectralOperator op = build_operator(build_grid(2, state.range(0)));
    const WeightField w = build_weight("one", op.grid);
    const Nonlinearity nl = make_preset("exp");
    for (auto _ : state) {
        const SolveResult r = monotone_solve(op, w, nl, 0.5);
        benchmark::DoNotOptimize(r.point.sup_u);
    }
}
BENCHMARK(BM_monotone_solve)->Arg(15)->Arg(23);

static void BM_extend_harmonic(benchmark::State& state) {
    const SpectralOperator op = build_operator(build_grid(2, state.range(0)));
    const double height = 6.0 / op.sqrt_lambda1();
    for (auto _ : state) {
        const CylinderField f = extend_harmonic(op.grid, op.phi1, height, 48);
        benchmark::DoNotOptimize(f.residual);
    }
}
BENCHMARK(BM_extend_harmonic)->Arg(15)->Arg(23);

static void BM_stability_eigenvalue(benchmark::State& state) {
    const SpectralOperator op = build_operator(build_grid(2, state.range(0)));
    const WeightField w = build_weight("one", op.grid);
    const Nonlinearity nl = make_preset("exp");
    const SolveResult r = monotone_solve(op, w, nl, 0.5);
    for (auto _ : state)
        benchmark::DoNotOptimize(stability_eigenvalue(op, w, nl, r.point));
}
BENCHMARK(BM_stability_eigenvalue)->Arg(15)->Arg(23);

BENCHMARK_MAIN();
