// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS set to compare.

#include <benchmark/benchmark.h>

#include <numeric>

#include "swaprank/evalkit.hpp"
#include "swaprank/labelgen.hpp"
#include "swaprank/rankernet.hpp"
#include "swaprank/rng.hpp"
#include "swaprank/synth.hpp"

using namespace swaprank;

namespace {

const SyntheticDataset& dataset() {
    static const SyntheticDataset data = [] {
        SyntheticBenchmarkSpec spec;
        spec.n_targets = 400;
        spec.swaps_per_target = 15;
        spec.noise_sigma = 0.1;
        spec.seed = 1;
        return synth_benchmark(spec);
    }();
    return data;
}

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::Parallel : Execution::Serial; }

void BM_GenerateLabels(benchmark::State& state) {
    const auto& data = dataset();
    LabelGenConfig cfg;
    cfg.use_identity = true;
    for (auto _ : state) benchmark::DoNotOptimize(generate_dataset_labels(data.groups, cfg, mode(state)));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.groups.size()));
}

void BM_BatchGradient(benchmark::State& state) {
    const auto& data = dataset();
    static const auto labels = generate_dataset_labels(data.groups, {});
    static const auto pairs = pairs_from_labels(labels, data.features);
    const auto model = init_model(data.feature_dim, kDefaultHiddenDims, 3);
    std::vector<std::size_t> idx(static_cast<std::size_t>(state.range(1)));
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (auto _ : state) benchmark::DoNotOptimize(batch_gradient(model, pairs, idx, 0.5, mode(state)));
    state.SetItemsProcessed(state.iterations() * state.range(1));
}

void BM_Consistency(benchmark::State& state) {
    Rng rng(5);
    std::vector<double> pred(2000), mos(2000);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        mos[i] = 1 + 4 * rng.uniform();
        pred[i] = mos[i] + rng.normal(0, 0.5);
    }
    const auto pairs = all_pairs(pred, mos);
    for (auto _ : state) benchmark::DoNotOptimize(consistency(pairs, Granularity::Coarse, mode(state)));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pairs.size()));
}

}  // namespace

BENCHMARK(BM_GenerateLabels)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchGradient)->ArgsProduct({{0, 1}, {32, 256}})->ArgNames({"parallel", "batch"});
BENCHMARK(BM_Consistency)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
