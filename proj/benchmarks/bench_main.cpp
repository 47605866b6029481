#include <benchmark/benchmark.h>

#include "evo/models.hpp"

namespace {

evo::Trajectory ramp(const evo::TimeGrid& g, std::size_t dof) {
    evo::Trajectory f(g, dof);
    for (std::size_t n = 0; n < g.n_steps(); ++n) {
        for (std::size_t i = 0; i < dof; ++i) {
            f.values()(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i)) =
                std::sin(0.1 * static_cast<double>(n + i));
        }
    }
    return f;
}

evo::ModelSpec spec(evo::ModelName name, std::size_t n_cells) {
    evo::ModelSpec s;
    s.name = name;
    s.n_cells = n_cells;
    s.dimension = name == evo::ModelName::Maxwell ? 3 : 1;
    return s;
}

void BM_StepSolveHeat(benchmark::State& state) {
    const evo::Model m = evo::build(spec(evo::ModelName::Heat, static_cast<std::size_t>(state.range(0))));
    const evo::TimeGrid g(1e-3, 1001, 2.0);
    const evo::StepSolver solver(m.law, m.op.matrix, g.dt());
    const evo::Trajectory f = ramp(g, m.dof());
    for (auto _ : state) {
        benchmark::DoNotOptimize(solver.solve(f));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.n_steps()));
}
BENCHMARK(BM_StepSolveHeat)->Arg(32)->Arg(128)->Arg(512);

void BM_StepSolveMaxwell(benchmark::State& state) {
    const evo::Model m = evo::build(spec(evo::ModelName::Maxwell, static_cast<std::size_t>(state.range(0))));
    const evo::TimeGrid g(1e-3, 101, 2.0);
    const evo::StepSolver solver(m.law, m.op.matrix, g.dt());
    const evo::Trajectory f = ramp(g, m.dof());
    for (auto _ : state) {
        benchmark::DoNotOptimize(solver.solve(f));
    }
}
BENCHMARK(BM_StepSolveMaxwell)->Arg(6)->Arg(10);

// Grunwald-Letnikov memory is quadratic in the number of steps.
void BM_GlApply(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const evo::TimeGrid g(1.0 / static_cast<double>(n), n, 2.0);
    const evo::Trajectory u = ramp(g, 16);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evo::d0_frac(u, 0.5));
    }
}
BENCHMARK(BM_GlApply)->Arg(250)->Arg(1000)->Arg(4000);

void BM_StochasticIntegral(benchmark::State& state) {
    const evo::Model m = evo::build(spec(evo::ModelName::Heat, 64));
    const evo::TimeGrid g(1e-3, static_cast<std::size_t>(state.range(0)), 2.0);
    const evo::WienerPath path = m.sample_path(g, 7);
    const evo::SigmaSpec sigma = evo::SigmaSpec::affine(1.0, 0.5, 1.0);
    const evo::Trajectory u = ramp(g, m.dof());
    for (auto _ : state) {
        benchmark::DoNotOptimize(evo::stochastic_integral(sigma, u, path));
    }
}
BENCHMARK(BM_StochasticIntegral)->Arg(1001)->Arg(10001);

void BM_PicardHeat(benchmark::State& state) {
    evo::ModelSpec s = spec(evo::ModelName::Heat, 32);
    s.sigma = evo::SigmaSpec::affine(1.0, 0.2, 1.0);
    const evo::Model m = evo::build(s);
    const evo::TimeGrid g(1e-2, 201, 2.0);
    const evo::WienerPath path = m.sample_path(g, 1);
    const evo::EvoProblem p = m.problem(m.zero_forcing(g), path);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evo::solve_multiplicative(p, evo::SolveOptions{2.0, 1e-8, 100, std::nullopt}));
    }
}
BENCHMARK(BM_PicardHeat);

} // namespace

BENCHMARK_MAIN();
