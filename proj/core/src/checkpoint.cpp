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

#include "seed/checkpoint.hpp"

#include <cmath>

#include "binio.hpp"

namespace seed {

namespace {

constexpr char kCkptMagic[8] = {'S', 'E', 'E', 'D', 'C', 'K', 'P', 'T'};
constexpr uint32_t kCkptVersion = 1;

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams<float>& m,
                     const NoiseSchedule& s) {
    std::string out;
    out.append(kCkptMagic, 8);
    binio::append_u32(out, kCkptVersion);
    binio::append_u32(out, static_cast<uint32_t>(m.dim));
    binio::append_u32(out, static_cast<uint32_t>(m.temb_dim));
    binio::append_u32(out, static_cast<uint32_t>(m.n_blocks));
    binio::append_u32(out, static_cast<uint32_t>(s.steps));
    binio::append_f64(out, s.beta_start);
    binio::append_f64(out, s.beta_end);
    out.push_back(m.standardizer_enabled ? '\x01' : '\x00');
    for (float v : m.std_mean) binio::append_f32(out, v);
    for (float v : m.std_scale) binio::append_f32(out, v);

    auto tensors = collect_tensors(const_cast<ModelParams<float>&>(m));
    for (const auto& t : tensors) {
        for (float v : *t.data) binio::append_f32(out, v);
    }
    binio::store_file(path, out);
}

Checkpoint load_checkpoint(const std::string& path) {
    const std::string buf = binio::load_file(path);
    binio::Reader r{buf, 0, path};

    const std::string magic = r.bytes(8, "magic");
    if (magic != std::string(kCkptMagic, 8)) {
        throw DataError(path + ": bad magic (not a SEEDCKPT file)");
    }
    const uint32_t version = r.u32("version");
    if (version != kCkptVersion) {
        throw DataError(path + ": unsupported SEEDCKPT version " + std::to_string(version));
    }
    const uint32_t dim = r.u32("dim");
    const uint32_t temb_dim = r.u32("temb_dim");
    const uint32_t n_blocks = r.u32("n_blocks");
    const uint32_t T = r.u32("schedule T");
    const double beta_start = r.f64("beta_start");
    const double beta_end = r.f64("beta_end");
    if (dim < 1 || dim > (1u << 24)) throw DataError(path + ": implausible dim " + std::to_string(dim));
    if (temb_dim < 2 || temb_dim % 2 != 0) {
        throw DataError(path + ": temb_dim must be even and >= 2, got " + std::to_string(temb_dim));
    }
    if (n_blocks < 1 || n_blocks > (1u << 16)) {
        throw DataError(path + ": implausible n_blocks " + std::to_string(n_blocks));
    }
    if (T < 1) throw DataError(path + ": schedule T must be >= 1");
    if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
        throw DataError(path + ": invalid beta range [" + std::to_string(beta_start) + ", " +
                        std::to_string(beta_end) + "]");
    }

    Checkpoint ckpt;
    ckpt.T = static_cast<int>(T);
    ckpt.beta_start = beta_start;
    ckpt.beta_end = beta_end;
    ckpt.model = allocate_params<float>(static_cast<int>(dim), static_cast<int>(temb_dim),
                                        static_cast<int>(n_blocks));

    const uint8_t std_flag = static_cast<uint8_t>(r.bytes(1, "standardizer flag")[0]);
    if (std_flag > 1) {
        throw DataError(path + ": standardizer flag must be 0 or 1, got " +
                        std::to_string(std_flag));
    }
    ckpt.model.standardizer_enabled = std_flag == 1;
    for (uint32_t i = 0; i < dim; ++i) ckpt.model.std_mean[i] = r.f32("standardizer mean");
    for (uint32_t i = 0; i < dim; ++i) {
        const float sigma = r.f32("standardizer scale");
        if (!(sigma > 0.0f) || !std::isfinite(sigma)) {
            throw DataError(path + ": standardizer scale[" + std::to_string(i) +
                            "] must be finite and > 0");
        }
        ckpt.model.std_scale[i] = sigma;
    }

    for (auto& t : collect_tensors(ckpt.model)) {
        for (auto& v : *t.data) {
            v = r.f32("tensor " + t.name);
            if (!std::isfinite(v)) {
                throw DataError(path + ": non-finite value in tensor " + t.name);
            }
        }
    }
    if (r.pos != buf.size()) {
        throw DataError(path + ": " + std::to_string(buf.size() - r.pos) +
                        " trailing bytes after parameter tensors");
    }
    return ckpt;
}

}  // namespace seed
