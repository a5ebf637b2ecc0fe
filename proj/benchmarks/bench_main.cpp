#include <benchmark/benchmark.h>

#include "lsw/asymptotics.hpp"
#include "lsw/simulator.hpp"
#include "lsw/spectral.hpp"
#include "lsw/whittle.hpp"

using namespace lsw;

namespace {

const ModelSpec& model()
{
    static const ModelSpec m = sec4_model();
    return m;
}

ParamVector truth() { return ParamVector(model(), {0.15, 0.2, 0.5, 0.3, 0.5}); }

std::vector<double> series(int T) { return simulate_path(model(), truth(), SimConfig{T, 1, 1}); }

// T = 512 with block length N and the nearest shift to N / 3.
BlockPlan plan_for(int N) { return find_nearest_plan(512, N, N / 3); }

} // namespace

static void BM_Innovations(benchmark::State& state)
{
    const int T = static_cast<int>(state.range(0));
    const CovKernel kernel(model(), truth(), T);
    for (auto _ : state)
        benchmark::DoNotOptimize(innovations_decompose(kernel));
    state.SetComplexityN(T);
}
BENCHMARK(BM_Innovations)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond)->Complexity();

static void BM_SimulatePath(benchmark::State& state)
{
    const int T = static_cast<int>(state.range(0));
    const auto decomposition = innovations_decompose(CovKernel(model(), truth(), T));
    std::uint64_t r = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate_path(decomposition, SimConfig{T, 1, ++r}));
}
BENCHMARK(BM_SimulatePath)->Arg(512)->Arg(1024)->Unit(benchmark::kMicrosecond);

static void BM_Periodogram(benchmark::State& state)
{
    const auto x = series(512);
    const auto plan = plan_for(static_cast<int>(state.range(0)));
    const auto taper = taper_weights(Taper::Kind::cosine_bell, plan.N);
    for (auto _ : state)
        benchmark::DoNotOptimize(local_periodogram(x, plan, taper));
}
BENCHMARK(BM_Periodogram)->Arg(64)->Arg(104)->Arg(105)->Arg(128)->Unit(benchmark::kMicrosecond);

static void BM_Objective(benchmark::State& state)
{
    const auto x = series(512);
    const auto plan = plan_for(104);
    const WhittleObjective obj(local_periodogram(x, plan, taper_weights(Taper::Kind::cosine_bell, plan.N)), model());
    const auto th = truth();
    const std::vector<double> values(th.values().begin(), th.values().end());
    for (auto _ : state)
        benchmark::DoNotOptimize(obj(values));
}
BENCHMARK(BM_Objective)->Unit(benchmark::kMicrosecond);

static void BM_Fit(benchmark::State& state)
{
    const auto x = series(512);
    const auto plan = plan_for(104);
    const auto taper = taper_weights(Taper::Kind::cosine_bell, plan.N);
    for (auto _ : state)
        benchmark::DoNotOptimize(estimate(x, model(), plan, taper));
}
BENCHMARK(BM_Fit)->Unit(benchmark::kMillisecond);

static void BM_GammaQuadrature(benchmark::State& state)
{
    const auto th = truth();
    for (auto _ : state)
        benchmark::DoNotOptimize(gamma_quadrature(model(), th));
}
BENCHMARK(BM_GammaQuadrature)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
