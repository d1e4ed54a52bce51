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

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "seed/error.hpp"
#include "seed/rng.hpp"

// The denoising network: a stack of residual fully-connected blocks with
// additive timestep conditioning, plus hand-written reverse-mode gradients for
// every trainable parameter. Everything is templated on the scalar type so the
// float training path and the double gradient-check path share one code path.

namespace seed {

inline constexpr double kLayerNormEps = 1e-5;

template <typename Real>
struct LinearParams {
    int out_dim = 0;
    int in_dim = 0;
    std::vector<Real> w;  // row-major, out_dim x in_dim
    std::vector<Real> b;  // out_dim

    void resize(int out, int in) {
        out_dim = out;
        in_dim = in;
        w.assign(static_cast<size_t>(out) * in, Real(0));
        b.assign(out, Real(0));
    }
};

template <typename Real>
struct NormParams {
    std::vector<Real> gain;
    std::vector<Real> bias;

    void resize(int n) {
        gain.assign(n, Real(0));
        bias.assign(n, Real(0));
    }
};

// One residual block over a D-vector x conditioned on an E-vector temb:
//   h1  = Linear(SiLU(LayerNorm(x)))        D  -> 2D
//   h2  = h1 + Linear(SiLU(LayerNorm(temb)))  E  -> 2D
//   out = x + Linear(SiLU(LayerNorm(h2)))   2D -> D
template <typename Real>
struct ResidualBlockParams {
    NormParams<Real> in_norm;        // over D
    LinearParams<Real> in_weight;    // D -> 2D
    NormParams<Real> temb_norm;      // over E
    LinearParams<Real> temb_weight;  // E -> 2D
    NormParams<Real> out_norm;       // over 2D
    LinearParams<Real> out_weight;   // 2D -> D
};

template <typename Real>
struct ModelParams {
    int dim = 0;       // D, embedding dimension
    int temb_dim = 0;  // E, timestep-embedding dimension (even)
    int n_blocks = 0;
    std::vector<ResidualBlockParams<Real>> blocks;
    LinearParams<Real> temb_mlp1;      // E -> E
    LinearParams<Real> temb_mlp2;      // E -> E, SiLU between the two
    NormParams<Real> final_norm;       // over D
    LinearParams<Real> final_weight;   // D -> D, residual
    bool standardizer_enabled = true;
    std::vector<Real> std_mean;   // mu, length D
    std::vector<Real> std_scale;  // sigma, length D, strictly positive
};

// Gradient tree: same tensors as ModelParams minus the standardizer, which is
// fitted, not trained.
template <typename Real>
struct Gradients {
    std::vector<ResidualBlockParams<Real>> blocks;
    LinearParams<Real> temb_mlp1, temb_mlp2;
    NormParams<Real> final_norm;
    LinearParams<Real> final_weight;
};

// ---------------------------------------------------------------------------
// Tensor traversal
// ---------------------------------------------------------------------------

enum class TensorKind { Weight, Bias, NormGain, NormBias };

// Weight decay applies to weight matrices only.
inline bool is_decayed(TensorKind k) { return k == TensorKind::Weight; }

template <typename Real>
struct TensorRef {
    std::string name;
    std::vector<Real>* data;
    TensorKind kind;
};

// Canonical traversal order shared by the optimizer, checkpoint serialization,
// and parameter initialization: blocks in index order (in_norm gain/bias,
// in_weight w/b, temb_norm gain/bias, temb_weight w/b, out_norm gain/bias,
// out_weight w/b), then temb_mlp1, temb_mlp2, final_norm, final_weight.
// Works for both ModelParams and Gradients since they share member names.
template <typename Tree>
auto collect_tensors(Tree& tree) {
    using Real = typename std::decay_t<decltype(tree.final_weight.w)>::value_type;
    std::vector<TensorRef<Real>> out;
    auto add_norm = [&out](const std::string& prefix, NormParams<Real>& n) {
        out.push_back({prefix + ".gain", &n.gain, TensorKind::NormGain});
        out.push_back({prefix + ".bias", &n.bias, TensorKind::NormBias});
    };
    auto add_linear = [&out](const std::string& prefix, LinearParams<Real>& l) {
        out.push_back({prefix + ".w", &l.w, TensorKind::Weight});
        out.push_back({prefix + ".b", &l.b, TensorKind::Bias});
    };
    for (size_t i = 0; i < tree.blocks.size(); ++i) {
        const std::string p = "blocks[" + std::to_string(i) + "]";
        add_norm(p + ".in_norm", tree.blocks[i].in_norm);
        add_linear(p + ".in_weight", tree.blocks[i].in_weight);
        add_norm(p + ".temb_norm", tree.blocks[i].temb_norm);
        add_linear(p + ".temb_weight", tree.blocks[i].temb_weight);
        add_norm(p + ".out_norm", tree.blocks[i].out_norm);
        add_linear(p + ".out_weight", tree.blocks[i].out_weight);
    }
    add_linear("temb_mlp1", tree.temb_mlp1);
    add_linear("temb_mlp2", tree.temb_mlp2);
    add_norm("final_norm", tree.final_norm);
    add_linear("final_weight", tree.final_weight);
    return out;
}

// ---------------------------------------------------------------------------
// Primitive forward/backward stages
// ---------------------------------------------------------------------------

namespace detail {

template <typename Real>
struct NormCache {
    std::vector<Real> xhat;  // normalized, pre-affine
    Real inv_std{};
};

template <typename Real>
void layer_norm(std::span<const Real> x, const NormParams<Real>& p, std::vector<Real>& y,
                NormCache<Real>& c) {
    const size_t n = x.size();
    Real mean = Real(0);
    for (Real v : x) mean += v;
    mean /= static_cast<Real>(n);
    Real var = Real(0);
    for (Real v : x) {
        const Real d = v - mean;
        var += d * d;
    }
    var /= static_cast<Real>(n);
    c.inv_std = Real(1) / std::sqrt(var + static_cast<Real>(kLayerNormEps));
    c.xhat.resize(n);
    y.resize(n);
    for (size_t i = 0; i < n; ++i) {
        c.xhat[i] = (x[i] - mean) * c.inv_std;
        y[i] = p.gain[i] * c.xhat[i] + p.bias[i];
    }
}

// dx from dy; accumulates dgain/dbias.
template <typename Real>
void layer_norm_backward(const NormParams<Real>& p, const NormCache<Real>& c,
                         std::span<const Real> dy, std::vector<Real>& dx, NormParams<Real>& dp) {
    const size_t n = dy.size();
    Real sum_dxhat = Real(0);
    Real sum_dxhat_xhat = Real(0);
    dx.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const Real dxhat = dy[i] * p.gain[i];
        dx[i] = dxhat;  // staged; corrected below
        sum_dxhat += dxhat;
        sum_dxhat_xhat += dxhat * c.xhat[i];
        dp.gain[i] += dy[i] * c.xhat[i];
        dp.bias[i] += dy[i];
    }
    const Real inv_n = Real(1) / static_cast<Real>(n);
    const Real mean_dxhat = sum_dxhat * inv_n;
    const Real mean_dxhat_xhat = sum_dxhat_xhat * inv_n;
    for (size_t i = 0; i < n; ++i) {
        dx[i] = c.inv_std * (dx[i] - mean_dxhat - c.xhat[i] * mean_dxhat_xhat);
    }
}

template <typename Real>
Real sigmoid(Real u) {
    return Real(1) / (Real(1) + std::exp(-u));
}

template <typename Real>
void silu(std::span<const Real> u, std::vector<Real>& y) {
    y.resize(u.size());
    for (size_t i = 0; i < u.size(); ++i) y[i] = u[i] * sigmoid(u[i]);
}

// du from dy given the cached pre-activation u.
template <typename Real>
void silu_backward(std::span<const Real> u, std::span<const Real> dy, std::vector<Real>& du) {
    du.resize(u.size());
    for (size_t i = 0; i < u.size(); ++i) {
        const Real s = sigmoid(u[i]);
        du[i] = dy[i] * (s * (Real(1) + u[i] * (Real(1) - s)));
    }
}

template <typename Real>
void linear(std::span<const Real> x, const LinearParams<Real>& p, std::vector<Real>& y) {
    y.resize(p.out_dim);
    for (int o = 0; o < p.out_dim; ++o) {
        Real acc = p.b[o];
        const Real* row = p.w.data() + static_cast<size_t>(o) * p.in_dim;
        for (int i = 0; i < p.in_dim; ++i) acc += row[i] * x[i];
        y[static_cast<size_t>(o)] = acc;
    }
}

// dx from dy; accumulates dw/db.
template <typename Real>
void linear_backward(std::span<const Real> x, const LinearParams<Real>& p,
                     std::span<const Real> dy, std::vector<Real>& dx, LinearParams<Real>& dp) {
    dx.assign(p.in_dim, Real(0));
    for (int o = 0; o < p.out_dim; ++o) {
        const Real g = dy[static_cast<size_t>(o)];
        dp.b[o] += g;
        const Real* row = p.w.data() + static_cast<size_t>(o) * p.in_dim;
        Real* drow = dp.w.data() + static_cast<size_t>(o) * p.in_dim;
        for (int i = 0; i < p.in_dim; ++i) {
            drow[i] += g * x[i];
            dx[static_cast<size_t>(i)] += row[i] * g;
        }
    }
}

// One LayerNorm -> SiLU -> Linear stage.
template <typename Real>
struct StageCache {
    NormCache<Real> norm;
    std::vector<Real> ln_out;    // SiLU pre-activation
    std::vector<Real> silu_out;  // linear input
};

template <typename Real>
std::vector<Real> stage_forward(std::span<const Real> x, const NormParams<Real>& norm,
                                const LinearParams<Real>& lin, StageCache<Real>& c) {
    layer_norm<Real>(x, norm, c.ln_out, c.norm);
    silu<Real>(c.ln_out, c.silu_out);
    std::vector<Real> y;
    linear<Real>(c.silu_out, lin, y);
    return y;
}

template <typename Real>
std::vector<Real> stage_backward(std::span<const Real> dy, const NormParams<Real>& norm,
                                 const LinearParams<Real>& lin, const StageCache<Real>& c,
                                 NormParams<Real>& dnorm, LinearParams<Real>& dlin) {
    std::vector<Real> d_silu, d_ln, dx;
    linear_backward<Real>(c.silu_out, lin, dy, d_silu, dlin);
    silu_backward<Real>(c.ln_out, d_silu, d_ln);
    layer_norm_backward<Real>(norm, c.norm, d_ln, dx, dnorm);
    return dx;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Timestep embedding
// ---------------------------------------------------------------------------

// component 2i   = sin(t / 10000^(2i/dim))
// component 2i+1 = cos(t / 10000^(2i/dim)),  i in {0 .. dim/2 - 1}
template <typename Real>
std::vector<Real> sinusoidal_timestep_embedding(int t, int dim) {
    if (dim < 2 || dim % 2 != 0) {
        throw ConfigError("timestep embedding size must be even and >= 2, got " +
                          std::to_string(dim));
    }
    if (t < 0) throw DataError("timestep embedding: t must be >= 0, got " + std::to_string(t));
    std::vector<Real> out(dim);
    for (int i = 0; i < dim / 2; ++i) {
        const double freq = std::pow(10000.0, static_cast<double>(2 * i) / dim);
        const double arg = static_cast<double>(t) / freq;
        out[static_cast<size_t>(2 * i)] = static_cast<Real>(std::sin(arg));
        out[static_cast<size_t>(2 * i) + 1] = static_cast<Real>(std::cos(arg));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Forward
// ---------------------------------------------------------------------------

template <typename Real>
struct BlockCache {
    detail::StageCache<Real> in_stage;
    detail::StageCache<Real> temb_stage;
    detail::StageCache<Real> out_stage;
};

template <typename Real>
std::vector<Real> block_forward(const ResidualBlockParams<Real>& p, std::span<const Real> x,
                                std::span<const Real> temb, BlockCache<Real>& c) {
    if (static_cast<int>(x.size()) != p.in_weight.in_dim ||
        static_cast<int>(temb.size()) != p.temb_weight.in_dim) {
        throw DataError("block_forward: input shapes do not match block parameters");
    }
    std::vector<Real> h2 = detail::stage_forward<Real>(x, p.in_norm, p.in_weight, c.in_stage);
    const std::vector<Real> pt =
        detail::stage_forward<Real>(temb, p.temb_norm, p.temb_weight, c.temb_stage);
    for (size_t i = 0; i < h2.size(); ++i) h2[i] += pt[i];
    const std::vector<Real> proj =
        detail::stage_forward<Real>(h2, p.out_norm, p.out_weight, c.out_stage);
    std::vector<Real> out(x.begin(), x.end());
    for (size_t i = 0; i < out.size(); ++i) out[i] += proj[i];
    return out;
}

template <typename Real>
std::vector<Real> block_forward(const ResidualBlockParams<Real>& p, std::span<const Real> x,
                                std::span<const Real> temb) {
    BlockCache<Real> scratch;
    return block_forward(p, x, temb, scratch);
}

template <typename Real>
struct ModelCache {
    std::vector<Real> z0;         // standardized input
    std::vector<Real> pe;         // sinusoidal embedding
    std::vector<Real> mlp1_out;   // SiLU pre-activation
    std::vector<Real> mlp1_silu;  // temb_mlp2 input
    std::vector<Real> temb;
    std::vector<BlockCache<Real>> blocks;
    detail::StageCache<Real> final_stage;
};

// Standardized coordinates: z = (e - mu) / sigma componentwise. The diffusion
// process, the training objective, and the DDIM sampler all live in this
// space; raw embeddings are converted at the model boundary only.
template <typename Real>
std::vector<Real> standardize(const ModelParams<Real>& m, std::span<const Real> e) {
    std::vector<Real> z(e.begin(), e.end());
    if (m.standardizer_enabled) {
        for (int i = 0; i < m.dim; ++i) {
            z[static_cast<size_t>(i)] = (e[i] - m.std_mean[i]) / m.std_scale[i];
        }
    }
    return z;
}

template <typename Real>
std::vector<Real> destandardize(const ModelParams<Real>& m, std::span<const Real> z) {
    std::vector<Real> e(z.begin(), z.end());
    if (m.standardizer_enabled) {
        for (int i = 0; i < m.dim; ++i) {
            e[static_cast<size_t>(i)] = z[i] * m.std_scale[i] + m.std_mean[i];
        }
    }
    return e;
}

// Network core over standardized states.
template <typename Real>
std::vector<Real> model_forward_std(const ModelParams<Real>& m, std::span<const Real> z0, int t,
                                    ModelCache<Real>& c) {
    if (static_cast<int>(z0.size()) != m.dim) {
        throw DataError("model_forward: state dim " + std::to_string(z0.size()) +
                        " does not match model dim " + std::to_string(m.dim));
    }
    c.z0.assign(z0.begin(), z0.end());

    c.pe = sinusoidal_timestep_embedding<Real>(t, m.temb_dim);
    detail::linear<Real>(c.pe, m.temb_mlp1, c.mlp1_out);
    detail::silu<Real>(c.mlp1_out, c.mlp1_silu);
    detail::linear<Real>(c.mlp1_silu, m.temb_mlp2, c.temb);

    c.blocks.resize(m.blocks.size());
    std::vector<Real> z = c.z0;
    for (size_t b = 0; b < m.blocks.size(); ++b) {
        z = block_forward<Real>(m.blocks[b], z, c.temb, c.blocks[b]);
    }

    // Final projection is residual, like the blocks, so a zero-initialized
    // model is the identity map.
    const std::vector<Real> proj =
        detail::stage_forward<Real>(z, m.final_norm, m.final_weight, c.final_stage);
    for (size_t i = 0; i < z.size(); ++i) z[i] += proj[i];
    return z;
}

// Raw-space view: standardize, run the core, de-standardize.
template <typename Real>
std::vector<Real> model_forward(const ModelParams<Real>& m, std::span<const Real> e, int t,
                                ModelCache<Real>& c) {
    if (static_cast<int>(e.size()) != m.dim) {
        throw DataError("model_forward: embedding dim " + std::to_string(e.size()) +
                        " does not match model dim " + std::to_string(m.dim));
    }
    const std::vector<Real> z = standardize<Real>(m, e);
    const std::vector<Real> out = model_forward_std<Real>(m, z, t, c);
    return destandardize<Real>(m, out);
}

template <typename Real>
std::vector<Real> model_forward(const ModelParams<Real>& m, std::span<const Real> e, int t) {
    ModelCache<Real> scratch;
    return model_forward(m, e, t, scratch);
}

// ---------------------------------------------------------------------------
// Backward
// ---------------------------------------------------------------------------

template <typename Real>
Gradients<Real> make_gradients(const ModelParams<Real>& m) {
    Gradients<Real> g;
    g.blocks.resize(m.blocks.size());
    for (size_t b = 0; b < m.blocks.size(); ++b) {
        const auto& src = m.blocks[b];
        auto& dst = g.blocks[b];
        dst.in_norm.resize(static_cast<int>(src.in_norm.gain.size()));
        dst.in_weight.resize(src.in_weight.out_dim, src.in_weight.in_dim);
        dst.temb_norm.resize(static_cast<int>(src.temb_norm.gain.size()));
        dst.temb_weight.resize(src.temb_weight.out_dim, src.temb_weight.in_dim);
        dst.out_norm.resize(static_cast<int>(src.out_norm.gain.size()));
        dst.out_weight.resize(src.out_weight.out_dim, src.out_weight.in_dim);
    }
    g.temb_mlp1.resize(m.temb_mlp1.out_dim, m.temb_mlp1.in_dim);
    g.temb_mlp2.resize(m.temb_mlp2.out_dim, m.temb_mlp2.in_dim);
    g.final_norm.resize(static_cast<int>(m.final_norm.gain.size()));
    g.final_weight.resize(m.final_weight.out_dim, m.final_weight.in_dim);
    return g;
}

template <typename Real>
void zero_gradients(Gradients<Real>& g) {
    for (auto& t : collect_tensors(g)) {
        std::fill(t.data->begin(), t.data->end(), Real(0));
    }
}

template <typename Real>
void scale_gradients(Gradients<Real>& g, Real factor) {
    for (auto& t : collect_tensors(g)) {
        for (auto& v : *t.data) v *= factor;
    }
}

template <typename Real>
void add_gradients(Gradients<Real>& acc, const Gradients<Real>& other) {
    auto dst = collect_tensors(acc);
    auto src = collect_tensors(const_cast<Gradients<Real>&>(other));
    for (size_t i = 0; i < dst.size(); ++i) {
        auto& d = *dst[i].data;
        const auto& s = *src[i].data;
        for (size_t j = 0; j < d.size(); ++j) d[j] += s[j];
    }
}

namespace detail {

// Backprop through one block. d_out is the gradient at the block output;
// returns the gradient at the block input and accumulates into dtemb and dp.
template <typename Real>
std::vector<Real> block_backward(const ResidualBlockParams<Real>& p, const BlockCache<Real>& c,
                                 std::span<const Real> d_out, std::vector<Real>& dtemb,
                                 ResidualBlockParams<Real>& dp) {
    // out = x + proj(h2): residual passthrough plus the projected branch.
    std::vector<Real> dh2 =
        stage_backward<Real>(d_out, p.out_norm, p.out_weight, c.out_stage, dp.out_norm,
                             dp.out_weight);
    // h2 = h1 + pt
    const std::vector<Real> dt =
        stage_backward<Real>(dh2, p.temb_norm, p.temb_weight, c.temb_stage, dp.temb_norm,
                             dp.temb_weight);
    for (size_t i = 0; i < dtemb.size(); ++i) dtemb[i] += dt[i];
    std::vector<Real> dx =
        stage_backward<Real>(dh2, p.in_norm, p.in_weight, c.in_stage, dp.in_norm, dp.in_weight);
    for (size_t i = 0; i < dx.size(); ++i) dx[i] += d_out[i];
    return dx;
}

}  // namespace detail

// Accumulates d(loss)/d(theta) into grads from a cache produced by
// model_forward_std, for a loss whose gradient with respect to the
// standardized core output is out_grad. Matches central finite differences.
template <typename Real>
void model_backward_std_cached(const ModelParams<Real>& m, const ModelCache<Real>& c,
                               std::span<const Real> out_grad, Gradients<Real>& grads) {
    if (static_cast<int>(out_grad.size()) != m.dim) {
        throw DataError("model_backward: out_grad dim does not match model dim");
    }

    std::vector<Real> dz(out_grad.begin(), out_grad.end());

    // Final residual projection.
    {
        const std::vector<Real> d_in = detail::stage_backward<Real>(
            dz, m.final_norm, m.final_weight, c.final_stage, grads.final_norm,
            grads.final_weight);
        for (size_t i = 0; i < dz.size(); ++i) dz[i] += d_in[i];
    }

    std::vector<Real> dtemb(m.temb_dim, Real(0));
    for (size_t b = m.blocks.size(); b-- > 0;) {
        dz = detail::block_backward<Real>(m.blocks[b], c.blocks[b], dz, dtemb, grads.blocks[b]);
    }

    // Timestep MLP: temb = L2(SiLU(L1(pe))). pe has no parameters.
    std::vector<Real> d_silu, d_mlp1, d_pe;
    detail::linear_backward<Real>(c.mlp1_silu, m.temb_mlp2, dtemb, d_silu, grads.temb_mlp2);
    detail::silu_backward<Real>(c.mlp1_out, d_silu, d_mlp1);
    detail::linear_backward<Real>(c.pe, m.temb_mlp1, d_mlp1, d_pe, grads.temb_mlp1);
}

// Raw-space variant: out_grad is with respect to the de-standardized output.
template <typename Real>
void model_backward_cached(const ModelParams<Real>& m, const ModelCache<Real>& c,
                           std::span<const Real> out_grad, Gradients<Real>& grads) {
    if (static_cast<int>(out_grad.size()) != m.dim) {
        throw DataError("model_backward: out_grad dim does not match model dim");
    }
    // De-standardization: out = core * sigma + mu.
    std::vector<Real> dz(out_grad.begin(), out_grad.end());
    if (m.standardizer_enabled) {
        for (int i = 0; i < m.dim; ++i) dz[static_cast<size_t>(i)] *= m.std_scale[i];
    }
    model_backward_std_cached<Real>(m, c, dz, grads);
}

template <typename Real>
void model_backward(const ModelParams<Real>& m, std::span<const Real> e, int t,
                    std::span<const Real> out_grad, Gradients<Real>& grads) {
    ModelCache<Real> c;
    model_forward<Real>(m, e, t, c);
    model_backward_cached<Real>(m, c, out_grad, grads);
}

template <typename Real>
Gradients<Real> model_backward(const ModelParams<Real>& m, std::span<const Real> e, int t,
                               std::span<const Real> out_grad) {
    Gradients<Real> g = make_gradients(m);
    model_backward<Real>(m, e, t, out_grad, g);
    return g;
}

// ---------------------------------------------------------------------------
// Initialization
// ---------------------------------------------------------------------------

// Validates hyperparameters and allocates the full parameter tree: norm gains
// 1, everything else 0, standardizer mu=0 sigma=1.
template <typename Real>
ModelParams<Real> allocate_params(int dim, int temb_dim, int n_blocks) {
    if (dim < 1) throw ConfigError("model: dim must be >= 1, got " + std::to_string(dim));
    if (temb_dim < 2 || temb_dim % 2 != 0) {
        throw ConfigError("model: temb_dim must be even and >= 2, got " +
                          std::to_string(temb_dim));
    }
    if (n_blocks < 1) {
        throw ConfigError("model: n_blocks must be >= 1, got " + std::to_string(n_blocks));
    }

    const int hidden = 2 * dim;
    ModelParams<Real> m;
    m.dim = dim;
    m.temb_dim = temb_dim;
    m.n_blocks = n_blocks;
    m.blocks.resize(n_blocks);

    auto ones = [](std::vector<Real>& v) { std::fill(v.begin(), v.end(), Real(1)); };
    for (auto& blk : m.blocks) {
        blk.in_norm.resize(dim);
        ones(blk.in_norm.gain);
        blk.in_weight.resize(hidden, dim);
        blk.temb_norm.resize(temb_dim);
        ones(blk.temb_norm.gain);
        blk.temb_weight.resize(hidden, temb_dim);
        blk.out_norm.resize(hidden);
        ones(blk.out_norm.gain);
        blk.out_weight.resize(dim, hidden);
    }
    m.temb_mlp1.resize(temb_dim, temb_dim);
    m.temb_mlp2.resize(temb_dim, temb_dim);
    m.final_norm.resize(dim);
    ones(m.final_norm.gain);
    m.final_weight.resize(dim, dim);

    m.std_mean.assign(dim, Real(0));
    m.std_scale.assign(dim, Real(1));
    m.standardizer_enabled = true;
    return m;
}

// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)]; norm gains 1; all
// biases 0; the residual output layer of every block and the final projection
// stay zero, so a fresh model is the identity map. Draw order: per block in
// index order, in_weight then temb_weight; then temb_mlp1, temb_mlp2.
template <typename Real>
ModelParams<Real> init_params(int dim, int temb_dim, int n_blocks, uint64_t seed) {
    ModelParams<Real> m = allocate_params<Real>(dim, temb_dim, n_blocks);
    Rng rng(seed);
    auto fill_uniform = [&rng](LinearParams<Real>& l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(l.in_dim));
        for (auto& v : l.w) v = static_cast<Real>(rng.uniform(-bound, bound));
    };
    for (auto& blk : m.blocks) {
        fill_uniform(blk.in_weight);
        fill_uniform(blk.temb_weight);
    }
    fill_uniform(m.temb_mlp1);
    fill_uniform(m.temb_mlp2);
    return m;
}

// float <-> double conversion for the 64-bit verification path.
template <typename To, typename From>
ModelParams<To> convert_params(const ModelParams<From>& src) {
    ModelParams<To> dst;
    dst.dim = src.dim;
    dst.temb_dim = src.temb_dim;
    dst.n_blocks = src.n_blocks;
    dst.standardizer_enabled = src.standardizer_enabled;
    dst.std_mean.assign(src.std_mean.begin(), src.std_mean.end());
    dst.std_scale.assign(src.std_scale.begin(), src.std_scale.end());
    dst.blocks.resize(src.blocks.size());
    auto conv_norm = [](const NormParams<From>& a, NormParams<To>& b) {
        b.gain.assign(a.gain.begin(), a.gain.end());
        b.bias.assign(a.bias.begin(), a.bias.end());
    };
    auto conv_lin = [](const LinearParams<From>& a, LinearParams<To>& b) {
        b.out_dim = a.out_dim;
        b.in_dim = a.in_dim;
        b.w.assign(a.w.begin(), a.w.end());
        b.b.assign(a.b.begin(), a.b.end());
    };
    for (size_t i = 0; i < src.blocks.size(); ++i) {
        conv_norm(src.blocks[i].in_norm, dst.blocks[i].in_norm);
        conv_lin(src.blocks[i].in_weight, dst.blocks[i].in_weight);
        conv_norm(src.blocks[i].temb_norm, dst.blocks[i].temb_norm);
        conv_lin(src.blocks[i].temb_weight, dst.blocks[i].temb_weight);
        conv_norm(src.blocks[i].out_norm, dst.blocks[i].out_norm);
        conv_lin(src.blocks[i].out_weight, dst.blocks[i].out_weight);
    }
    conv_lin(src.temb_mlp1, dst.temb_mlp1);
    conv_lin(src.temb_mlp2, dst.temb_mlp2);
    conv_norm(src.final_norm, dst.final_norm);
    conv_lin(src.final_weight, dst.final_weight);
    return dst;
}

// ---------------------------------------------------------------------------
// Gradient verification
// ---------------------------------------------------------------------------

struct GradCheckConfig {
    int dim = 6;
    int temb_dim = 4;
    std::vector<int> block_counts{1, 2, 3};
    int seeds = 3;
    int timesteps = 3;
    int timestep_range = 1000;
    double fd_step = 1e-4;
};

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::string worst_tensor;
    long checked_params = 0;
};

// Compares analytic gradients against central finite differences in double
// precision, over every trainable parameter of fully randomized models.
GradCheckResult gradient_check(const GradCheckConfig& cfg);

}  // namespace seed
