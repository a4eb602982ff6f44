// SPDX-License-Identifier: Apache-2.0
// OpenMP kernels against their serial twins.
#include <benchmark/benchmark.h>

#include "curvelane/kernels.hpp"
#include "curvelane/synth.hpp"

using namespace curvelane;

namespace {

const std::vector<kernels::BlendSample>& corpus()
{
    static const auto samples = [] {
        SynthSceneConfig cfg;
        cfg.num_scenes = 64;
        std::vector<kernels::BlendSample> out;
        for (const auto& s : generate_synthetic_scenes(cfg)) {
            out.push_back(io::to_sample(s));
        }
        return out;
    }();
    return samples;
}

const std::vector<ArchEncoding>& genomes()
{
    static const auto all = [] {
        Rng rng(0);
        std::vector<ArchEncoding> out;
        for (int i = 0; i < 4096; ++i) {
            out.push_back(random_arch(rng));
        }
        return out;
    }();
    return all;
}

BlendParamSet blend_params()
{
    auto p = BlendParamSet::plain_nms({2, 3}, 0.5, 102.5);
    p.locality_sigma = 35.0;
    return p;
}

void BM_score_corpus(benchmark::State& state)
{
    const auto params = blend_params();
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::score_corpus(corpus(), params));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus().size()));
}

void BM_score_corpus_serial(benchmark::State& state)
{
    const auto params = blend_params();
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::score_corpus_serial(corpus(), params));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus().size()));
}

void BM_evaluate_genomes(benchmark::State& state)
{
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::evaluate_genomes(genomes()));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(genomes().size()));
}

void BM_evaluate_genomes_serial(benchmark::State& state)
{
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::evaluate_genomes_serial(genomes()));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(genomes().size()));
}

} // namespace

BENCHMARK(BM_score_corpus)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_score_corpus_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_evaluate_genomes)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_evaluate_genomes_serial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
