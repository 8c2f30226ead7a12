#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "sparse_nlms/algorithms.hpp"
#include "sparse_nlms/experiment.hpp"

using namespace sparse_nlms;

namespace {

// One filter update at N taps for the variant given by range(1).
void BM_Step(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Variant v = kAllVariants[static_cast<std::size_t>(state.range(1))];
    AlgorithmSpec spec;
    spec.variant = v;
    spec.rho_za = 2e-5;
    spec.rho_rza = 2e-4;

    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::vector<std::vector<double>> xs(64, std::vector<double>(n));
    std::vector<double> ys(64);
    for (auto& x : xs)
        for (auto& xi : x) xi = g(rng);
    for (auto& y : ys) y = g(rng);

    FilterState s = FilterState::zeros(n);
    std::size_t k = 0;
    for (auto _ : state) {
        s = step(s, spec, xs[k % 64], ys[k % 64]).state;
        benchmark::DoNotOptimize(s.weights.data());
        ++k;
    }
    state.SetLabel(std::string(to_string(v)));
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()));
}
BENCHMARK(BM_Step)->ArgsProduct({{16, 60, 256}, {0, 1, 2, 3, 4, 5}});

// A full 5000-iteration trial at the reference scenario.
void BM_Trial(benchmark::State& state) {
    ExperimentConfig c;
    const Variant v = kAllVariants[static_cast<std::size_t>(state.range(0))];
    const Scenario s{3, 10.0};
    std::uint64_t seed = 0;
    for (auto _ : state) {
        auto t = run_trial(c, s, v, seed++);
        benchmark::DoNotOptimize(t.records.data());
    }
    state.SetLabel(std::string(to_string(v)));
}
BENCHMARK(BM_Trial)->DenseRange(0, 5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
