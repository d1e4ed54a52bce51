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

#include "seed/schedule.hpp"

#include <cstdio>

namespace seed {

NoiseSchedule make_scaled_linear_schedule(int steps, double beta_start, double beta_end) {
    if (steps < 1) {
        throw ConfigError("schedule: T must be >= 1, got " + std::to_string(steps));
    }
    if (!(beta_start > 0.0) || !(beta_start < 1.0)) {
        throw ConfigError("schedule: beta_start must lie in (0, 1), got " +
                          std::to_string(beta_start));
    }
    if (!(beta_end < 1.0) || !(beta_end >= beta_start)) {
        throw ConfigError("schedule: beta_end must lie in [beta_start, 1), got " +
                          std::to_string(beta_end));
    }

    NoiseSchedule s;
    s.steps = steps;
    s.beta_start = beta_start;
    s.beta_end = beta_end;
    s.beta.resize(steps);
    s.alpha.resize(steps);
    s.alpha_bar.resize(steps);

    const double sqrt_start = std::sqrt(beta_start);
    const double sqrt_end = std::sqrt(beta_end);
    double running = 1.0;
    for (int t = 1; t <= steps; ++t) {
        double b;
        if (steps == 1) {
            b = beta_start;
        } else {
            const double frac = static_cast<double>(t - 1) / static_cast<double>(steps - 1);
            const double root = sqrt_start + frac * (sqrt_end - sqrt_start);
            b = root * root;
        }
        const size_t i = static_cast<size_t>(t) - 1;
        s.beta[i] = b;
        s.alpha[i] = 1.0 - b;
        running *= s.alpha[i];
        s.alpha_bar[i] = running;
    }
    return s;
}

std::string format_schedule_table(const NoiseSchedule& s) {
    std::string out;
    out.reserve(static_cast<size_t>(s.steps) * 64);
    char line[128];
    for (int t = 1; t <= s.steps; ++t) {
        const size_t i = static_cast<size_t>(t) - 1;
        std::snprintf(line, sizeof(line), "%d\t%.12g\t%.12g\t%.12g\n", t, s.beta[i], s.alpha[i],
                      s.alpha_bar[i]);
        out += line;
    }
    return out;
}

}  // namespace seed
