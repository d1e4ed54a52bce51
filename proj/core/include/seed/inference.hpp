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

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "seed/error.hpp"
#include "seed/network.hpp"
#include "seed/parallel.hpp"
#include "seed/rng.hpp"
#include "seed/schedule.hpp"

// Applying a trained model: single-step enhancement at a fixed timestep,
// optional multi-step deterministic DDIM refinement, optional feature
// ensembling.

namespace seed {

struct InferenceConfig {
    int t_infer = 50;
    int steps = 1;             // 1 = single-step sample prediction
    bool ensemble = false;     // add the raw input back onto the output
    bool noise_first = false;  // ablation: forward-noise the input to t_infer first
    uint64_t seed = 0;         // drives noise_first only
};

// Uniformly spaced sub-schedule from t_start down to 0 (inclusive), strictly
// decreasing; rounding collisions collapse.
std::vector<int> ddim_sub_schedule(int t_start, int steps);

// Deterministic DDIM refinement starting from state y at timestep t_start.
// predict(state, t) must return the model's clean estimate; the final segment
// lands exactly on the last prediction since alpha_bar(0) = 1.
template <typename Real, typename Predictor>
std::vector<Real> ddim_refine(std::span<const Real> y, int t_start, int steps,
                              const NoiseSchedule& s, Predictor&& predict) {
    s.check_timestep(t_start);
    if (steps < 1) throw ConfigError("ddim_refine: steps must be >= 1");
    const std::vector<int> taus = ddim_sub_schedule(t_start, steps);
    std::vector<Real> state(y.begin(), y.end());
    for (size_t j = 0; j + 1 < taus.size(); ++j) {
        const std::vector<Real> x0_hat = predict(std::span<const Real>(state), taus[j]);
        state = ddim_step<Real>(state, x0_hat, taus[j], taus[j + 1], s);
    }
    return state;
}

// The input is standardized and the result treated as the corrupted state
// y_{t_infer}; refinement runs in standardized coordinates and the final
// estimate is mapped back to raw space. No forward noising happens unless
// cfg.noise_first asks for the textbook ablation.
template <typename Real>
std::vector<Real> enhance(const ModelParams<Real>& m, std::span<const Real> e,
                          const NoiseSchedule& s, const InferenceConfig& cfg,
                          Rng* noise_rng = nullptr) {
    if (static_cast<int>(e.size()) != m.dim) {
        throw DataError("enhance: embedding dim " + std::to_string(e.size()) +
                        " does not match model dim " + std::to_string(m.dim));
    }
    s.check_timestep(cfg.t_infer);
    if (cfg.steps < 1) throw ConfigError("enhance: steps must be >= 1");

    std::vector<Real> state = standardize<Real>(m, e);
    if (cfg.noise_first) {
        Rng local(cfg.seed);
        Rng& rng = noise_rng != nullptr ? *noise_rng : local;
        const std::vector<Real> eps = rng.gaussian_vector<Real>(m.dim);
        state = forward_diffuse<Real>(state, eps, cfg.t_infer, s);
    }
    ModelCache<Real> cache;
    const std::vector<Real> z0 =
        ddim_refine<Real>(std::span<const Real>(state), cfg.t_infer, cfg.steps, s,
                          [&m, &cache](std::span<const Real> x, int t) {
                              return model_forward_std<Real>(m, x, t, cache);
                          });
    return destandardize<Real>(m, z0);
}

template <typename Real>
std::vector<Real> enhance_ensemble(const ModelParams<Real>& m, std::span<const Real> e,
                                   const NoiseSchedule& s, const InferenceConfig& cfg,
                                   Rng* noise_rng = nullptr) {
    std::vector<Real> out = enhance<Real>(m, e, s, cfg, noise_rng);
    for (size_t i = 0; i < out.size(); ++i) out[i] += e[i];
    return out;
}

// Per-item results are identical to calling enhance()/enhance_ensemble() one
// embedding at a time; noise_first noise comes from a per-index derived
// stream, so results do not depend on the thread count.
template <typename Real>
std::vector<std::vector<Real>> enhance_batch(const ModelParams<Real>& m,
                                             const std::vector<std::vector<Real>>& embeddings,
                                             const NoiseSchedule& s, const InferenceConfig& cfg,
                                             int threads = 1) {
    std::vector<std::vector<Real>> out(embeddings.size());
    auto run = [&](size_t lo, size_t hi, int) {
        for (size_t i = lo; i < hi; ++i) {
            Rng rng(Rng::derive(cfg.seed, i));
            out[i] = cfg.ensemble ? enhance_ensemble<Real>(m, embeddings[i], s, cfg, &rng)
                                  : enhance<Real>(m, embeddings[i], s, cfg, &rng);
        }
    };
    const int n_threads = resolve_thread_count(threads);
    if (n_threads <= 1 || embeddings.size() < 2) {
        run(0, embeddings.size(), 0);
    } else {
        parallel_for_chunks(embeddings.size(), n_threads, run);
    }
    return out;
}

}  // namespace seed
