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

#include <string>

#include "seed/network.hpp"
#include "seed/schedule.hpp"

// SEEDCKPT model checkpoint format: magic "SEEDCKPT", u32 version (=1),
// u32 D, u32 E, u32 n_blocks, u32 schedule T, f64 beta_start, f64 beta_end,
// u8 standardizer flag, mu[D] and sigma[D] as little-endian f32, then every
// parameter tensor as little-endian f32 in the canonical traversal order
// (see collect_tensors).

namespace seed {

struct Checkpoint {
    ModelParams<float> model;
    int T = 0;
    double beta_start = 0.0;
    double beta_end = 0.0;

    NoiseSchedule make_schedule() const { return make_scaled_linear_schedule(T, beta_start, beta_end); }
};

void save_checkpoint(const std::string& path, const ModelParams<float>& m,
                     const NoiseSchedule& s);

Checkpoint load_checkpoint(const std::string& path);

}  // namespace seed
