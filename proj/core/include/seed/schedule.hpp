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
#include <span>
#include <string>
#include <vector>

#include "seed/error.hpp"

namespace seed {

// Per-timestep diffusion tables: beta_t, alpha_t = 1 - beta_t, and the running
// product alpha_bar_t. Timesteps are 1-indexed, t in {1..steps}. Tables are
// kept in double regardless of the embedding precision; the cumulative product
// drifts visibly when accumulated in float. Immutable after construction and
// safe to share across threads.
struct NoiseSchedule {
    int steps = 0;
    double beta_start = 0.0;
    double beta_end = 0.0;
    std::vector<double> beta;       // beta[t-1]
    std::vector<double> alpha;      // alpha[t-1] = 1 - beta[t-1]
    std::vector<double> alpha_bar;  // alpha_bar[t-1] = prod_{tau<=t} alpha_tau

    void check_timestep(int t) const {
        if (t < 1 || t > steps) {
            throw DataError("timestep " + std::to_string(t) + " out of range [1, " +
                            std::to_string(steps) + "]");
        }
    }

    double beta_at(int t) const {
        check_timestep(t);
        return beta[static_cast<size_t>(t) - 1];
    }

    double alpha_at(int t) const {
        check_timestep(t);
        return alpha[static_cast<size_t>(t) - 1];
    }

    // alpha_bar_at(0) == 1 by convention, so a sampler step that lands on
    // t_prev = 0 returns the predicted sample unchanged.
    double alpha_bar_at(int t) const {
        if (t == 0) return 1.0;
        check_timestep(t);
        return alpha_bar[static_cast<size_t>(t) - 1];
    }
};

// beta_t = (sqrt(beta_start) + (t-1)/(T-1) * (sqrt(beta_end) - sqrt(beta_start)))^2.
// For steps == 1 the single entry is beta_start.
NoiseSchedule make_scaled_linear_schedule(int steps, double beta_start, double beta_end);

// Tab-separated rows "t beta alpha alpha_bar", 12 significant digits, one row
// per timestep. Used by the `schedule --dump` subcommand and golden tests.
std::string format_schedule_table(const NoiseSchedule& s);

namespace detail {

inline void check_same_dim(size_t a, size_t b, const char* op) {
    if (a != b) {
        throw DataError(std::string(op) + ": dimension mismatch (" + std::to_string(a) +
                        " vs " + std::to_string(b) + ")");
    }
}

}  // namespace detail

// x_t = sqrt(alpha_bar_t) * x0 + sqrt(1 - alpha_bar_t) * eps, componentwise.
template <typename Real>
std::vector<Real> forward_diffuse(std::span<const Real> x0, std::span<const Real> eps, int t,
                                  const NoiseSchedule& s) {
    detail::check_same_dim(x0.size(), eps.size(), "forward_diffuse");
    s.check_timestep(t);
    const double ab = s.alpha_bar_at(t);
    const Real signal = static_cast<Real>(std::sqrt(ab));
    const Real noise = static_cast<Real>(std::sqrt(1.0 - ab));
    std::vector<Real> out(x0.size());
    for (size_t i = 0; i < x0.size(); ++i) out[i] = signal * x0[i] + noise * eps[i];
    return out;
}

// Inverse of forward_diffuse given a noise estimate:
// x0 = (x_t - sqrt(1 - alpha_bar_t) * eps_hat) / sqrt(alpha_bar_t).
template <typename Real>
std::vector<Real> x0_from_eps(std::span<const Real> x_t, std::span<const Real> eps_hat, int t,
                              const NoiseSchedule& s) {
    detail::check_same_dim(x_t.size(), eps_hat.size(), "x0_from_eps");
    s.check_timestep(t);
    const double ab = s.alpha_bar_at(t);
    const Real noise = static_cast<Real>(std::sqrt(1.0 - ab));
    const Real inv_signal = static_cast<Real>(1.0 / std::sqrt(ab));
    std::vector<Real> out(x_t.size());
    for (size_t i = 0; i < x_t.size(); ++i) out[i] = (x_t[i] - noise * eps_hat[i]) * inv_signal;
    return out;
}

// Noise implied by a sample estimate:
// eps = (x_t - sqrt(alpha_bar_t) * x0_hat) / sqrt(1 - alpha_bar_t).
template <typename Real>
std::vector<Real> eps_from_x0(std::span<const Real> x_t, std::span<const Real> x0_hat, int t,
                              const NoiseSchedule& s) {
    detail::check_same_dim(x_t.size(), x0_hat.size(), "eps_from_x0");
    s.check_timestep(t);
    const double ab = s.alpha_bar_at(t);
    if (!(ab < 1.0)) {
        throw NumericError("eps_from_x0: alpha_bar at t=" + std::to_string(t) +
                           " is 1; implied noise is undefined");
    }
    const Real signal = static_cast<Real>(std::sqrt(ab));
    const Real inv_noise = static_cast<Real>(1.0 / std::sqrt(1.0 - ab));
    std::vector<Real> out(x_t.size());
    for (size_t i = 0; i < x_t.size(); ++i) out[i] = (x_t[i] - signal * x0_hat[i]) * inv_noise;
    return out;
}

// Deterministic (eta = 0) sampler update from t to t_prev given a sample
// prediction. t_prev = 0 returns x0_hat exactly (alpha_bar_0 = 1).
template <typename Real>
std::vector<Real> ddim_step(std::span<const Real> x_t, std::span<const Real> x0_hat, int t,
                            int t_prev, const NoiseSchedule& s) {
    detail::check_same_dim(x_t.size(), x0_hat.size(), "ddim_step");
    s.check_timestep(t);
    if (t_prev < 0 || t_prev >= t) {
        throw DataError("ddim_step: t_prev=" + std::to_string(t_prev) +
                        " must satisfy 0 <= t_prev < t=" + std::to_string(t));
    }
    const std::vector<Real> eps_hat = eps_from_x0(x_t, x0_hat, t, s);
    const double ab_prev = s.alpha_bar_at(t_prev);
    const Real signal = static_cast<Real>(std::sqrt(ab_prev));
    const Real noise = static_cast<Real>(std::sqrt(1.0 - ab_prev));
    std::vector<Real> out(x_t.size());
    for (size_t i = 0; i < x_t.size(); ++i) out[i] = signal * x0_hat[i] + noise * eps_hat[i];
    return out;
}

}  // namespace seed
