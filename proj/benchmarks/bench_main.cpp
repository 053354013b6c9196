#include <benchmark/benchmark.h>

#include <vector>

#include "catastrophe/exact.hpp"
#include "catastrophe/lab.hpp"
#include "catastrophe/process.hpp"

using namespace catastrophe;

namespace {

const ModelParams kUnit = validate_params(1.0, 1.0, 1.0);

void BM_PushforwardKernel(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> in(n, 1.0 / static_cast<double>(n)), out(n);
    std::vector<double> recip(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) recip[i] = 1.0 / static_cast<double>(i);
    for (auto _ : state) {
        benchmark::DoNotOptimize(pushforward_kernel(in, out, n, 0.5, recip));
        in.swap(out);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PushforwardKernel)->RangeMultiplier(4)->Range(64, 16384);

void BM_Transient(benchmark::State& state) {
    const double t = static_cast<double>(state.range(0));
    const std::size_t n = default_state_count(kUnit, t, static_cast<State>(1.5 * t));
    for (auto _ : state) benchmark::DoNotOptimize(transient_distribution(kUnit, t, 0, n, 1e-12));
}
BENCHMARK(BM_Transient)->Arg(25)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_RateCurveSublinear(benchmark::State& state) {
    const std::vector<double> grid{static_cast<double>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(empirical_rate_curve(kUnit, ScalingSpec(1.0, 0.5), 1.0, grid));
}
BENCHMARK(BM_RateCurveSublinear)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_SimulateEmbedded(benchmark::State& state) {
    std::uint64_t seed = 0;
    for (auto _ : state) {
        RandomStream rng(seed++);
        benchmark::DoNotOptimize(fold_embedded(kUnit, 1000.0, 0, rng, [](double, State) {}));
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SimulateEmbedded);

void BM_SimulateDecomposed(benchmark::State& state) {
    std::uint64_t seed = 0;
    for (auto _ : state) {
        RandomStream rng(seed++);
        benchmark::DoNotOptimize(fold_decomposed(kUnit, 1000.0, 0, rng, [](double, State) {}));
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SimulateDecomposed);

void BM_ImportanceSampling(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(is_estimate_tail(kUnit, ScalingSpec(1.0, 1.0), 1.5, 50.0, 10000, 1));
}
BENCHMARK(BM_ImportanceSampling)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
