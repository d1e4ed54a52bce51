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

#include "seed/inference.hpp"

#include <cmath>

namespace seed {

std::vector<int> ddim_sub_schedule(int t_start, int steps) {
    if (t_start < 1) throw ConfigError("ddim_sub_schedule: t_start must be >= 1");
    if (steps < 1) throw ConfigError("ddim_sub_schedule: steps must be >= 1");
    std::vector<int> taus;
    taus.reserve(static_cast<size_t>(steps) + 1);
    for (int j = 0; j <= steps; ++j) {
        const int tau = static_cast<int>(
            std::llround(static_cast<double>(t_start) * (steps - j) / steps));
        if (taus.empty() || tau < taus.back()) taus.push_back(tau);
    }
    return taus;  // starts at t_start, strictly decreasing, ends at 0
}

}  // namespace seed
