// Microbenchmarks for the numerical hot paths: the closed-form filter
// distance against its quadrature oracle, root-domain sampling, pairwise
// table construction and k-medoids sweeps.

#include <benchmark/benchmark.h>

#include <vector>

#include "argap/clustering.hpp"
#include "argap/distance.hpp"
#include "argap/filter.hpp"
#include "argap/mixture.hpp"
#include "argap/rng.hpp"
#include "argap/sampler.hpp"
#include "argap/simulate.hpp"

using namespace argap;

namespace {

std::vector<Filter> sample_filters(int order, int count, std::uint64_t seed) {
    const auto weights = cached_volumes(order, 100'000, 1);
    Rng rng(seed);
    std::vector<Filter> filters;
    filters.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) filters.push_back(sample_uniform_stable_filter(order, weights, rng));
    return filters;
}

void bm_filter_distance_residue(benchmark::State& state) {
    const int order = static_cast<int>(state.range(0));
    const auto filters = sample_filters(order, 2, 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(filter_distance(filters[0], filters[1], 1.0));
}
BENCHMARK(bm_filter_distance_residue)->Arg(1)->Arg(2)->Arg(4)->Arg(6);

void bm_filter_distance_quadrature(benchmark::State& state) {
    const auto filters = sample_filters(4, 2, 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            filter_distance_quadrature(filters[0], filters[1], 1.0, static_cast<int>(state.range(0))));
}
BENCHMARK(bm_filter_distance_quadrature)->Arg(1024)->Arg(8192)->Arg(16384);

void bm_sample_uniform_filter(benchmark::State& state) {
    const int order = static_cast<int>(state.range(0));
    const auto weights = cached_volumes(order, 100'000, 1);
    Rng rng(11);
    for (auto _ : state)
        benchmark::DoNotOptimize(sample_uniform_stable_filter(order, weights, rng));
}
BENCHMARK(bm_sample_uniform_filter)->Arg(1)->Arg(2)->Arg(4)->Arg(6);

void bm_pairwise_distances(benchmark::State& state) {
    const auto filters = sample_filters(2, static_cast<int>(state.range(0)), 13);
    for (auto _ : state)
        benchmark::DoNotOptimize(pairwise_distances(filters, 1.0));
}
BENCHMARK(bm_pairwise_distances)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void bm_k_medoids(benchmark::State& state) {
    const auto filters = sample_filters(2, 500, 17);
    const DistanceTable table = pairwise_distances(filters, 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(k_medoids(table, static_cast<int>(state.range(0)), 3, 5));
}
BENCHMARK(bm_k_medoids)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

void bm_fit_em(benchmark::State& state) {
    const ScenarioTruth truth = make_scenario(1, 23);
    const TimeSeries series = generate_tvar(truth, 29);
    for (auto _ : state)
        benchmark::DoNotOptimize(fit_em(series, static_cast<int>(state.range(0)), 200, 1e-6, 1, 31));
}
BENCHMARK(bm_fit_em)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
