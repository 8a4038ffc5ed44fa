// Serial reference against the OpenMP sampler on the main Monte Carlo kernels.
// The range argument is the sample count.

#include "fblrate/mcbounds.hpp"
#include "fblrate/normapprox.hpp"
#include "fblrate/parallel.hpp"
#include "fblrate/randmat.hpp"

#include <benchmark/benchmark.h>

using namespace fblrate;

namespace {

SamplingPlan plan_for(const benchmark::State& state, Execution mode)
{
    SamplingPlan plan;
    plan.samples = state.range(0);
    plan.stream = RngStream{1, 0};
    plan.execution = mode;
    return plan;
}

template <Execution Mode>
void wishart_logdet_moments(benchmark::State& state)
{
    const auto plan = plan_for(state, Mode);
    for (auto _ : state) {
        auto acc = accumulate<RunningMoments>(plan, [](RandomSource& src, RunningMoments& out) {
            out.add(wishart_logdet(2, 4, src));
        });
        benchmark::DoNotOptimize(acc.mean());
    }
    state.SetItemsProcessed(state.iterations() * plan.samples);
}

template <Execution Mode>
void jbar_draws(benchmark::State& state)
{
    const auto plan = plan_for(state, Mode);
    const auto d = PowerAllocation::equal_power(1, 24, 316.0);
    for (auto _ : state) {
        auto acc = accumulate<RunningMoments>(plan, [&d](RandomSource& src, RunningMoments& out) {
            out.add(sample_jbar(d, 24, 316.0, 2, src));
        });
        benchmark::DoNotOptimize(acc.mean());
    }
    state.SetItemsProcessed(state.iterations() * plan.samples);
}

template <Execution Mode>
void istar_variance(benchmark::State& state)
{
    const auto plan = plan_for(state, Mode);
    for (auto _ : state) {
        auto acc = accumulate<RunningMoments>(plan, [](RandomSource& src, RunningMoments& out) {
            out.add(istar_centered_sample(8, 2, 2, src));
        });
        benchmark::DoNotOptimize(acc.variance());
    }
    state.SetItemsProcessed(state.iterations() * plan.samples);
}

template <Execution Mode>
void coherent_moments_uncached(benchmark::State& state)
{
    const auto plan = plan_for(state, Mode);
    for (auto _ : state) {
        auto m = coherent_moments(24, 316.0, 2, 2, plan, nullptr);
        benchmark::DoNotOptimize(m.dispersion.mean);
    }
    state.SetItemsProcessed(state.iterations() * plan.samples);
}

} // namespace

BENCHMARK(wishart_logdet_moments<Execution::serial>)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK(wishart_logdet_moments<Execution::parallel>)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK(jbar_draws<Execution::serial>)->Arg(1 << 15)->Unit(benchmark::kMillisecond);
BENCHMARK(jbar_draws<Execution::parallel>)->Arg(1 << 15)->Unit(benchmark::kMillisecond);
BENCHMARK(istar_variance<Execution::serial>)->Arg(1 << 17)->Unit(benchmark::kMillisecond);
BENCHMARK(istar_variance<Execution::parallel>)->Arg(1 << 17)->Unit(benchmark::kMillisecond);
BENCHMARK(coherent_moments_uncached<Execution::serial>)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK(coherent_moments_uncached<Execution::parallel>)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
