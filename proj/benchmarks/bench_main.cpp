// Copyright (c) 2026 The seed authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Microbenchmarks for the hot paths: schedule construction, network forward
// and backward passes, the grouped loss, DDIM refinement, and the EER sweep.

#include <benchmark/benchmark.h>

#include <vector>

#include "seed/eval.hpp"
#include "seed/inference.hpp"
#include "seed/network.hpp"
#include "seed/rng.hpp"
#include "seed/schedule.hpp"
#include "seed/training.hpp"

using namespace seed;

namespace {

void bm_schedule(benchmark::State& state) {
    for (auto _ : state) {
        NoiseSchedule s = make_scaled_linear_schedule(1000, 0.00085, 0.012);
        benchmark::DoNotOptimize(s.alpha_bar_at(1000));
    }
}
BENCHMARK(bm_schedule);

void bm_forward(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    const ModelParams<float> m = init_params<float>(dim, dim, 3, 42);
    Rng rng(7);
    const std::vector<float> e = rng.gaussian_vector<float>(dim);
    ModelCache<float> cache;
    for (auto _ : state) {
        benchmark::DoNotOptimize(model_forward<float>(m, e, 50, cache));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_forward)->Arg(16)->Arg(192)->Arg(256);

void bm_forward_backward(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    const ModelParams<float> m = init_params<float>(dim, dim, 3, 42);
    Rng rng(7);
    const std::vector<float> e = rng.gaussian_vector<float>(dim);
    Gradients<float> grads = make_gradients(m);
    std::vector<float> out_grad(static_cast<size_t>(dim), 1.0f);
    for (auto _ : state) {
        ModelCache<float> cache;
        std::vector<float> out = model_forward<float>(m, e, 50, cache);
        benchmark::DoNotOptimize(out);
        model_backward_cached<float>(m, cache, out_grad, grads);
        benchmark::DoNotOptimize(grads.final_weight.b.front());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_forward_backward)->Arg(16)->Arg(192);

void bm_seed_loss(benchmark::State& state) {
    const int dim = 16;
    const NoiseSchedule s = make_scaled_linear_schedule(1000, 0.00085, 0.012);
    const ModelParams<float> m = init_params<float>(dim, dim, 3, 42);
    Rng rng(7);
    PairGroup<float> g;
    g.group_id = "bench";
    g.clean = rng.gaussian_vector<float>(dim);
    for (int k = 0; k < 3; ++k) g.noisy.push_back(rng.gaussian_vector<float>(dim));
    const std::vector<float> eps = rng.gaussian_vector<float>(dim);
    Gradients<float> grads = make_gradients(m);
    for (auto _ : state) {
        zero_gradients(grads);
        benchmark::DoNotOptimize(
            seed_loss<float>(m, g, 137, eps, s, LossKind::Mse, grads, nullptr));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_seed_loss);

void bm_enhance(benchmark::State& state) {
    const int steps = static_cast<int>(state.range(0));
    const int dim = 16;
    const NoiseSchedule s = make_scaled_linear_schedule(1000, 0.00085, 0.012);
    const ModelParams<float> m = init_params<float>(dim, dim, 3, 42);
    Rng rng(7);
    const std::vector<float> e = rng.gaussian_vector<float>(dim);
    InferenceConfig cfg;
    cfg.steps = steps;
    for (auto _ : state) {
        benchmark::DoNotOptimize(enhance<float>(m, e, s, cfg));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_enhance)->Arg(1)->Arg(5)->Arg(25);

void bm_eer(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(7);
    ScoreSet s;
    for (int i = 0; i < n; ++i) {
        const bool target = (i % 3) == 0;
        s.scores.push_back(rng.gaussian() * 0.2 + (target ? 0.8 : 0.1));
        s.labels.push_back(target ? 1 : 0);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_eer(s).eer);
        benchmark::DoNotOptimize(compute_min_dcf(s, DcfParams{}).min_dcf);
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(bm_eer)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
