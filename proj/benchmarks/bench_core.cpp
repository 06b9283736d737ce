#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "stroketree/audio_io.hpp"
#include "stroketree/features.hpp"
#include "stroketree/forest.hpp"
#include "stroketree/rng.hpp"
#include "stroketree/trees.hpp"

using namespace stroketree;

namespace {

AudioClip bench_clip() {
    StrokeSpec spec;
    spec.label = "bench";
    spec.partial_freqs_hz = {180.0, 360.0, 540.0};
    spec.partial_amps = {1.0, 0.5, 0.25};
    spec.decay_s = 0.3;
    spec.noise_level = 0.05;
    spec.duration_s = 0.5;
    return synthesize_stroke(spec, 44100, 1);
}

Dataset bench_table(int n_rows, int n_features, int n_classes, std::uint64_t seed) {
    Rng rng(seed);
    Dataset ds;
    for (int f = 0; f < n_features; ++f) ds.feature_names.push_back("f" + std::to_string(f));
    for (int c = 0; c < n_classes; ++c) ds.class_names.push_back("c" + std::to_string(c));
    for (int i = 0; i < n_rows; ++i) {
        FeatureVector fv;
        fv.names = ds.feature_names;
        const int label = static_cast<int>(rng.next_index(n_classes));
        for (int f = 0; f < n_features; ++f) fv.values.push_back(label + rng.next_signed());
        fv.label = "c" + std::to_string(label);
        ds.rows.push_back(std::move(fv));
    }
    return ds;
}

} // namespace

static void BM_PowerSpectrum(benchmark::State& state) {
    AnalysisConfig cfg;
    Rng rng(3);
    std::vector<double> frame(cfg.frame_len);
    for (double& x : frame) x = rng.next_signed();
    for (auto _ : state) {
        auto spec = power_spectrum(frame, cfg, 44100);
        benchmark::DoNotOptimize(spec);
    }
}
BENCHMARK(BM_PowerSpectrum);

static void BM_ExtractFeatures(benchmark::State& state) {
    const AudioClip clip = bench_clip();
    AnalysisConfig cfg;
    for (auto _ : state) {
        auto fvs = extract_features(clip, cfg);
        benchmark::DoNotOptimize(fvs);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ExtractFeatures);

static void BM_FitCart(benchmark::State& state) {
    const Dataset ds = bench_table(static_cast<int>(state.range(0)), 20, 5, 77);
    for (auto _ : state) {
        TreeModel model = fit_cart(ds, TreeParams{});
        benchmark::DoNotOptimize(model);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FitCart)->Range(64, 1024)->Complexity();

static void BM_FitForest(benchmark::State& state) {
    const Dataset ds = bench_table(256, 20, 5, 78);
    ForestParams params;
    params.n_trees = static_cast<int>(state.range(0));
    params.seed = 9;
    for (auto _ : state) {
        ForestModel model = fit_forest(ds, params);
        benchmark::DoNotOptimize(model);
    }
}
BENCHMARK(BM_FitForest)->Arg(10)->Arg(50)->Arg(100);

static void BM_ForestPredict(benchmark::State& state) {
    const Dataset ds = bench_table(256, 20, 5, 79);
    ForestParams params;
    params.n_trees = 100;
    params.seed = 9;
    const ForestModel model = fit_forest(ds, params);
    std::size_t i = 0;
    for (auto _ : state) {
        auto p = predict_majority(model, ds.rows[i++ % ds.rows.size()]);
        benchmark::DoNotOptimize(p);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ForestPredict);

BENCHMARK_MAIN();
