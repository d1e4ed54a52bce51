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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "seed/error.hpp"
#include "seed/network.hpp"
#include "seed/parallel.hpp"
#include "seed/rng.hpp"
#include "seed/schedule.hpp"

// Multi-pair batch construction, the grouped reconstruction loss, AdamW with
// decoupled weight decay, and the epoch loop.

namespace seed {

// One clean embedding with N noisy variants of the same utterance.
template <typename Real>
struct PairGroup {
    std::string group_id;
    std::vector<Real> clean;
    std::vector<std::vector<Real>> noisy;
};

enum class LossKind { Mse, L2 };

LossKind parse_loss_kind(const std::string& name);      // "mse" | "l2"
std::string loss_kind_name(LossKind k);

// Plain-text loss history sidecar: "epoch<TAB>mean_loss", epochs 1-based.
void write_history_file(const std::string& path, const std::vector<double>& history);

struct TrainConfig {
    int epochs = 60;
    double lr = 5e-4;
    double weight_decay = 0.01;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    int groups_per_batch = 64;
    int T = 1000;                     // must match the schedule passed to train()
    uint64_t seed = 0;
    LossKind loss_kind = LossKind::Mse;
    int n_blocks = 3;
    int temb_dim = 0;                 // 0 -> same as embedding dim
    bool lr_linear_decay = false;     // constant lr by default
    bool deterministic = false;       // serial, ordered reductions
    int threads = 0;                  // 0 -> hardware concurrency
    double max_seconds = 0.0;         // 0 -> no wall-clock cap; checked at epoch ends
};

template <typename Real>
struct OptimizerState {
    Gradients<Real> m1;  // first moments
    Gradients<Real> m2;  // second moments
    long step = 0;
};

template <typename Real>
OptimizerState<Real> make_optimizer_state(const ModelParams<Real>& m) {
    OptimizerState<Real> st;
    st.m1 = make_gradients(m);
    st.m2 = make_gradients(m);
    return st;
}

// ---------------------------------------------------------------------------
// Loss
// ---------------------------------------------------------------------------

namespace detail {

// d(f, c) and d(d)/d(f) for the configured distance. Mse is the per-dimension
// mean of squared errors; L2 is the unsquared Euclidean norm (zero gradient at
// the non-differentiable origin).
template <typename Real>
Real distance_and_grad(std::span<const Real> f, std::span<const Real> c, LossKind kind,
                       std::vector<Real>& out_grad) {
    const size_t n = f.size();
    out_grad.resize(n);
    if (kind == LossKind::Mse) {
        Real acc = Real(0);
        for (size_t i = 0; i < n; ++i) {
            const Real d = f[i] - c[i];
            acc += d * d;
            out_grad[i] = Real(2) * d / static_cast<Real>(n);
        }
        return acc / static_cast<Real>(n);
    }
    Real acc = Real(0);
    for (size_t i = 0; i < n; ++i) {
        const Real d = f[i] - c[i];
        acc += d * d;
    }
    const Real norm = std::sqrt(acc);
    if (norm > Real(0)) {
        for (size_t i = 0; i < n; ++i) out_grad[i] = (f[i] - c[i]) / norm;
    } else {
        std::fill(out_grad.begin(), out_grad.end(), Real(0));
    }
    return norm;
}

}  // namespace detail

// Diffused states produced inside one loss evaluation, exposed for tests of
// the shared-noise algebra. States live in standardized coordinates.
template <typename Real>
struct SeedLossTrace {
    std::vector<Real> x_t;                // diffused standardized clean
    std::vector<std::vector<Real>> y_t;   // diffused standardized noisy variants
};

// Grouped reconstruction objective: one (t, eps) shared by the clean member
// and every noisy variant, loss = d(z_c, f(x_t,t)) + sum_k d(z_c, f(y_t^k,t))
// where z_c is the standardized clean embedding, x_t / y_t^k are the
// standardized members diffused with the shared noise, and f is the network
// core. Diffusing after standardization keeps the states unit-scale per
// dimension, which the noise schedule is calibrated for. Gradients of the
// total are accumulated into grads.
template <typename Real>
Real seed_loss(const ModelParams<Real>& m, const PairGroup<Real>& g, int t,
               std::span<const Real> eps, const NoiseSchedule& s, LossKind kind,
               Gradients<Real>& grads, SeedLossTrace<Real>* trace = nullptr) {
    if (static_cast<int>(g.clean.size()) != m.dim) {
        throw DataError("seed_loss: group '" + g.group_id + "' dim " +
                        std::to_string(g.clean.size()) + " does not match model dim " +
                        std::to_string(m.dim));
    }
    if (eps.size() != g.clean.size()) {
        throw DataError("seed_loss: eps dim does not match embedding dim");
    }
    for (const auto& v : g.noisy) {
        if (v.size() != g.clean.size()) {
            throw DataError("seed_loss: noisy variant dim mismatch in group '" + g.group_id +
                            "'");
        }
    }
    if (trace != nullptr) trace->y_t.clear();

    const std::vector<Real> z_clean = standardize<Real>(m, g.clean);
    std::vector<Real> out_grad;
    ModelCache<Real> cache;
    auto term = [&](std::span<const Real> member, bool is_clean) {
        const std::vector<Real> z = standardize<Real>(m, member);
        const std::vector<Real> state = forward_diffuse<Real>(z, eps, t, s);
        if (trace != nullptr) {
            if (is_clean) {
                trace->x_t = state;
            } else {
                trace->y_t.push_back(state);
            }
        }
        const std::vector<Real> f = model_forward_std<Real>(m, state, t, cache);
        const Real d = detail::distance_and_grad<Real>(f, z_clean, kind, out_grad);
        model_backward_std_cached<Real>(m, cache, out_grad, grads);
        return d;
    };

    Real loss = term(g.clean, true);
    for (const auto& v : g.noisy) loss += term(v, false);
    return loss;
}

// ---------------------------------------------------------------------------
// Optimizer
// ---------------------------------------------------------------------------

// AdamW with decoupled decay: theta <- theta - lr * mhat1/(sqrt(mhat2)+eps)
//                                          - lr * weight_decay * theta.
// Decay touches weight matrices only, never norm parameters or bias vectors.
template <typename Real>
void optimizer_step(ModelParams<Real>& m, OptimizerState<Real>& st, const Gradients<Real>& grads,
                    const TrainConfig& c, double lr_override = -1.0) {
    const double lr = lr_override >= 0.0 ? lr_override : c.lr;
    st.step += 1;
    const double bc1 = 1.0 - std::pow(c.adam_beta1, static_cast<double>(st.step));
    const double bc2 = 1.0 - std::pow(c.adam_beta2, static_cast<double>(st.step));

    auto params = collect_tensors(m);
    auto g_list = collect_tensors(const_cast<Gradients<Real>&>(grads));
    auto m1_list = collect_tensors(st.m1);
    auto m2_list = collect_tensors(st.m2);

    for (size_t ti = 0; ti < params.size(); ++ti) {
        std::vector<Real>& theta = *params[ti].data;
        const std::vector<Real>& g = *g_list[ti].data;
        std::vector<Real>& m1 = *m1_list[ti].data;
        std::vector<Real>& m2 = *m2_list[ti].data;
        const bool decay = is_decayed(params[ti].kind);
        for (size_t j = 0; j < theta.size(); ++j) {
            const double gj = static_cast<double>(g[j]);
            if (!std::isfinite(gj)) {
                throw NumericError("non-finite gradient in tensor " + params[ti].name +
                                   " at index " + std::to_string(j));
            }
            const double m1j = c.adam_beta1 * static_cast<double>(m1[j]) +
                               (1.0 - c.adam_beta1) * gj;
            const double m2j = c.adam_beta2 * static_cast<double>(m2[j]) +
                               (1.0 - c.adam_beta2) * gj * gj;
            m1[j] = static_cast<Real>(m1j);
            m2[j] = static_cast<Real>(m2j);
            const double update = (m1j / bc1) / (std::sqrt(m2j / bc2) + c.adam_eps);
            double next = static_cast<double>(theta[j]) - lr * update;
            if (decay) next -= lr * c.weight_decay * static_cast<double>(theta[j]);
            theta[j] = static_cast<Real>(next);
        }
    }
}

// ---------------------------------------------------------------------------
// Standardizer
// ---------------------------------------------------------------------------

// Per-dimension mean and population standard deviation over the clean
// embeddings. Scales are floored so constant dimensions stay invertible.
template <typename Real>
void fit_standardizer(const std::vector<PairGroup<Real>>& corpus, ModelParams<Real>& m,
                      double sigma_floor = 1e-6) {
    const size_t n = corpus.size();
    const int dim = m.dim;
    std::vector<double> mean(dim, 0.0), var(dim, 0.0);
    for (const auto& g : corpus) {
        for (int i = 0; i < dim; ++i) mean[static_cast<size_t>(i)] += g.clean[static_cast<size_t>(i)];
    }
    for (auto& v : mean) v /= static_cast<double>(n);
    for (const auto& g : corpus) {
        for (int i = 0; i < dim; ++i) {
            const double d = g.clean[static_cast<size_t>(i)] - mean[static_cast<size_t>(i)];
            var[static_cast<size_t>(i)] += d * d;
        }
    }
    for (int i = 0; i < dim; ++i) {
        const double sigma = std::sqrt(var[static_cast<size_t>(i)] / static_cast<double>(n));
        m.std_mean[static_cast<size_t>(i)] = static_cast<Real>(mean[static_cast<size_t>(i)]);
        m.std_scale[static_cast<size_t>(i)] = static_cast<Real>(std::max(sigma, sigma_floor));
    }
}

// ---------------------------------------------------------------------------
// Training loop
// ---------------------------------------------------------------------------

template <typename Real>
struct TrainResult {
    ModelParams<Real> model;
    std::vector<double> history;  // per-epoch mean loss over all groups
    int epochs_run = 0;
    bool stopped_by_time = false;
};

template <typename Real>
TrainResult<Real> train(const std::vector<PairGroup<Real>>& corpus, const TrainConfig& c,
                        const NoiseSchedule& s) {
    if (corpus.empty()) throw DataError("train: empty corpus");
    if (c.epochs < 1) throw ConfigError("train: epochs must be >= 1");
    if (c.lr <= 0.0) throw ConfigError("train: lr must be > 0");
    if (!(0.0 < c.adam_beta1 && c.adam_beta1 < c.adam_beta2 && c.adam_beta2 < 1.0)) {
        throw ConfigError("train: adam betas must satisfy 0 < beta1 < beta2 < 1");
    }
    if (c.groups_per_batch < 1) throw ConfigError("train: groups_per_batch must be >= 1");
    if (c.T != s.steps) {
        throw ConfigError("train: config T=" + std::to_string(c.T) +
                          " does not match schedule T=" + std::to_string(s.steps));
    }
    const int dim = static_cast<int>(corpus.front().clean.size());
    const size_t n_variants = corpus.front().noisy.size();
    if (n_variants < 1) throw DataError("train: groups must carry at least one noisy variant");
    for (const auto& g : corpus) {
        if (static_cast<int>(g.clean.size()) != dim) {
            throw DataError("train: inconsistent embedding dim in group '" + g.group_id + "'");
        }
        if (g.noisy.size() != n_variants) {
            throw DataError("train: inconsistent variant count in group '" + g.group_id + "'");
        }
        for (const auto& v : g.noisy) {
            if (static_cast<int>(v.size()) != dim) {
                throw DataError("train: inconsistent noisy dim in group '" + g.group_id + "'");
            }
        }
    }

    const int temb_dim = c.temb_dim > 0 ? c.temb_dim : dim;
    TrainResult<Real> result;
    result.model = init_params<Real>(dim, temb_dim, c.n_blocks, Rng::derive(c.seed, 0));
    fit_standardizer(corpus, result.model);
    OptimizerState<Real> st = make_optimizer_state(result.model);

    Rng shuffle_rng(Rng::derive(c.seed, 1));
    Rng draw_rng(Rng::derive(c.seed, 2));
    const int threads = c.deterministic ? 1 : resolve_thread_count(c.threads);

    std::vector<size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), size_t{0});
    Gradients<Real> batch_grads = make_gradients(result.model);

    const auto start = std::chrono::steady_clock::now();
    for (int epoch = 0; epoch < c.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        const double lr = c.lr_linear_decay
                              ? c.lr * static_cast<double>(c.epochs - epoch) / c.epochs
                              : c.lr;
        double epoch_loss = 0.0;

        for (size_t begin = 0; begin < order.size(); begin += static_cast<size_t>(c.groups_per_batch)) {
            const size_t end = std::min(order.size(), begin + static_cast<size_t>(c.groups_per_batch));
            const size_t batch_n = end - begin;

            // Per-group (t, eps) draws happen serially in visit order so the
            // sampled noise is independent of the thread count.
            std::vector<int> ts(batch_n);
            std::vector<std::vector<Real>> eps(batch_n);
            for (size_t i = 0; i < batch_n; ++i) {
                ts[i] = static_cast<int>(draw_rng.uniform_int(1, s.steps));
                eps[i] = draw_rng.gaussian_vector<Real>(dim);
            }

            zero_gradients(batch_grads);
            double batch_loss = 0.0;
            if (threads <= 1 || batch_n == 1) {
                for (size_t i = 0; i < batch_n; ++i) {
                    const PairGroup<Real>& g = corpus[order[begin + i]];
                    batch_loss += static_cast<double>(
                        seed_loss<Real>(result.model, g, ts[i], eps[i], s, c.loss_kind,
                                        batch_grads));
                }
            } else {
                // Per-chunk accumulators merged in chunk order keep results
                // reproducible for a fixed thread count.
                const int n_chunks = static_cast<int>(
                    std::min<size_t>(static_cast<size_t>(threads), batch_n));
                std::vector<Gradients<Real>> chunk_grads(n_chunks);
                std::vector<double> chunk_loss(n_chunks, 0.0);
                for (auto& cg : chunk_grads) cg = make_gradients(result.model);
                parallel_for_chunks(batch_n, n_chunks,
                                    [&](size_t lo, size_t hi, int chunk) {
                                        for (size_t i = lo; i < hi; ++i) {
                                            const PairGroup<Real>& g = corpus[order[begin + i]];
                                            chunk_loss[static_cast<size_t>(chunk)] +=
                                                static_cast<double>(seed_loss<Real>(
                                                    result.model, g, ts[i], eps[i], s,
                                                    c.loss_kind,
                                                    chunk_grads[static_cast<size_t>(chunk)]));
                                        }
                                    });
                for (int chunk = 0; chunk < n_chunks; ++chunk) {
                    add_gradients(batch_grads, chunk_grads[static_cast<size_t>(chunk)]);
                    batch_loss += chunk_loss[static_cast<size_t>(chunk)];
                }
            }

            if (!std::isfinite(batch_loss)) {
                throw NumericError("train: non-finite batch loss at epoch " +
                                   std::to_string(epoch + 1));
            }
            scale_gradients(batch_grads, static_cast<Real>(1.0 / static_cast<double>(batch_n)));
            optimizer_step(result.model, st, batch_grads, c, lr);
            epoch_loss += batch_loss;
        }

        result.history.push_back(epoch_loss / static_cast<double>(corpus.size()));
        result.epochs_run = epoch + 1;
        if (c.max_seconds > 0.0) {
            const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
            if (elapsed.count() >= c.max_seconds && epoch + 1 < c.epochs) {
                result.stopped_by_time = true;
                break;
            }
        }
    }
    return result;
}

}  // namespace seed
