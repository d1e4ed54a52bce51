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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "seed/error.hpp"
#include "seed/rng.hpp"
#include "seed/schedule.hpp"
#include "test_util.hpp"

using namespace seed;
using testutil::ld;

namespace {

// Recomputes beta_t from the closed form and the cumulative product in
// extended precision, independent of NoiseSchedule internals.
std::vector<ld> oracle_alpha_bar(int T, double beta_start, double beta_end) {
    std::vector<ld> bar(static_cast<size_t>(T) + 1);
    bar[0] = 1.0L;
    const ld rs = std::sqrt(static_cast<ld>(beta_start));
    const ld re = std::sqrt(static_cast<ld>(beta_end));
    ld prod = 1.0L;
    for (int t = 1; t <= T; ++t) {
        const ld frac = T == 1 ? 0.0L : static_cast<ld>(t - 1) / static_cast<ld>(T - 1);
        const ld root = rs + frac * (re - rs);
        prod *= 1.0L - root * root;
        bar[static_cast<size_t>(t)] = prod;
    }
    return bar;
}

}  // namespace

TEST_CASE("scaled-linear alpha_bar matches extended-precision cumprod at defaults") {
    const NoiseSchedule s = make_scaled_linear_schedule(1000, 0.00085, 0.012);
    const std::vector<ld> oracle = oracle_alpha_bar(1000, 0.00085, 0.012);
    double worst = 0.0;
    for (int t = 0; t <= 1000; ++t) {
        const double want = static_cast<double>(oracle[static_cast<size_t>(t)]);
        worst = std::max(worst, testutil::rel_err(s.alpha_bar_at(t), want));
    }
    CHECK(worst <= 1e-12);
    for (int t = 1; t <= 1000; ++t) {
        CHECK(s.alpha_bar_at(t) < s.alpha_bar_at(t - 1));
    }
    CHECK(s.alpha_bar_at(0) == 1.0);
}

TEST_CASE("constant-beta schedule follows the closed form (1-b)^t") {
    const NoiseSchedule s = make_scaled_linear_schedule(4, 0.1, 0.1);
    CHECK(s.alpha_bar_at(1) == doctest::Approx(0.9).epsilon(1e-14));
    CHECK(s.alpha_bar_at(2) == doctest::Approx(0.81).epsilon(1e-14));
    CHECK(s.alpha_bar_at(3) == doctest::Approx(0.729).epsilon(1e-14));
    CHECK(s.alpha_bar_at(4) == doctest::Approx(0.6561).epsilon(1e-14));
    for (int t = 1; t <= 4; ++t) {
        CHECK(s.beta_at(t) == doctest::Approx(0.1).epsilon(1e-15));
        CHECK(s.alpha_at(t) == doctest::Approx(0.9).epsilon(1e-15));
    }
}

TEST_CASE("beta interpolates monotonically from beta_start to beta_end") {
    const NoiseSchedule s = make_scaled_linear_schedule(1000, 0.00085, 0.012);
    CHECK(s.beta_at(1) == doctest::Approx(0.00085).epsilon(1e-14));
    CHECK(s.beta_at(1000) == doctest::Approx(0.012).epsilon(1e-14));
    for (int t = 2; t <= 1000; ++t) {
        CHECK(s.beta_at(t) > s.beta_at(t - 1));
    }
}

TEST_CASE("schedule construction validates its arguments") {
    CHECK_THROWS_AS(make_scaled_linear_schedule(0, 0.001, 0.01), ConfigError);
    CHECK_THROWS_AS(make_scaled_linear_schedule(10, 0.0, 0.01), ConfigError);
    CHECK_THROWS_AS(make_scaled_linear_schedule(10, 0.01, 0.001), ConfigError);
    CHECK_THROWS_AS(make_scaled_linear_schedule(10, 0.001, 1.0), ConfigError);
    const NoiseSchedule s = make_scaled_linear_schedule(10, 0.001, 0.01);
    CHECK_THROWS_AS(s.beta_at(0), DataError);
    CHECK_THROWS_AS(s.beta_at(11), DataError);
    CHECK_THROWS_AS(s.alpha_bar_at(-1), DataError);
    CHECK_NOTHROW(s.alpha_bar_at(0));
}

TEST_CASE("x0_from_eps inverts forward_diffuse in 32-bit across dims") {
    const NoiseSchedule s = make_scaled_linear_schedule(1000, 0.00085, 0.012);
    Rng rng(42);
    for (int d : {16, 192, 256, 512}) {
        for (int rep = 0; rep < 25; ++rep) {
            const std::vector<float> x0 = rng.gaussian_vector<float>(d);
            const std::vector<float> eps = rng.gaussian_vector<float>(d);
            const int t = static_cast<int>(rng.uniform_int(1, 1000));
            const std::vector<float> xt = forward_diffuse<float>(x0, eps, t, s);
            const std::vector<float> back = x0_from_eps<float>(xt, eps, t, s);
            CHECK(testutil::max_rel_vec_err(back, x0) <= 1e-5);
        }
    }
}

TEST_CASE("shared noise cancels: x_t - y_t = sqrt(alpha_bar)*(x0 - y0)") {
    const NoiseSchedule s = make_scaled_linear_schedule(1000, 0.00085, 0.012);
    Rng rng(7);
    for (int rep = 0; rep < 100; ++rep) {
        const int d = 16;
        const std::vector<double> x0 = rng.gaussian_vector<double>(d);
        const std::vector<double> y0 = rng.gaussian_vector<double>(d);
        const std::vector<double> eps = rng.gaussian_vector<double>(d);
        const int t = static_cast<int>(rng.uniform_int(1, 1000));
        const std::vector<double> xt = forward_diffuse<double>(x0, eps, t, s);
        const std::vector<double> yt = forward_diffuse<double>(y0, eps, t, s);
        const double root = std::sqrt(s.alpha_bar_at(t));
        std::vector<double> lhs(x0.size()), rhs(x0.size());
        for (size_t i = 0; i < x0.size(); ++i) {
            lhs[i] = xt[i] - yt[i];
            rhs[i] = root * (x0[i] - y0[i]);
        }
        CHECK(testutil::max_rel_vec_err(lhs, rhs) <= 1e-6);
    }
}

TEST_CASE("eps_from_x0 recovers the injected noise") {
    const NoiseSchedule s = make_scaled_linear_schedule(1000, 0.00085, 0.012);
    Rng rng(3);
    const std::vector<double> x0 = rng.gaussian_vector<double>(32);
    const std::vector<double> eps = rng.gaussian_vector<double>(32);
    for (int t : {1, 50, 500, 1000}) {
        const std::vector<double> xt = forward_diffuse<double>(x0, eps, t, s);
        const std::vector<double> back = eps_from_x0<double>(xt, x0, t, s);
        CHECK(testutil::max_rel_vec_err(back, eps) <= 1e-9);
    }
}

TEST_CASE("ddim_step lands exactly on the prediction at t_prev = 0") {
    const NoiseSchedule s = make_scaled_linear_schedule(1000, 0.00085, 0.012);
    Rng rng(11);
    const std::vector<double> x0 = rng.gaussian_vector<double>(8);
    const std::vector<double> eps = rng.gaussian_vector<double>(8);
    const std::vector<double> xt = forward_diffuse<double>(x0, eps, 50, s);
    const std::vector<double> x0_hat = rng.gaussian_vector<double>(8);
    const std::vector<double> out = ddim_step<double>(xt, x0_hat, 50, 0, s);
    for (size_t i = 0; i < out.size(); ++i) {
        CHECK(out[i] == x0_hat[i]);
    }
}

TEST_CASE("forward_diffuse rejects bad timesteps and mismatched dims") {
    const NoiseSchedule s = make_scaled_linear_schedule(100, 0.001, 0.01);
    const std::vector<double> x0(4, 0.0), eps(4, 0.0), eps3(3, 0.0);
    CHECK_THROWS_AS(forward_diffuse<double>(x0, eps, 0, s), DataError);
    CHECK_THROWS_AS(forward_diffuse<double>(x0, eps, 101, s), DataError);
    CHECK_THROWS_AS(forward_diffuse<double>(x0, eps3, 10, s), DataError);
}

TEST_CASE("schedule table is tab-separated with 12 significant digits") {
    const NoiseSchedule s = make_scaled_linear_schedule(2, 0.1, 0.2);
    const std::string table = format_schedule_table(s);
    CHECK(table.find("1\t0.1\t0.9\t0.9\n") != std::string::npos);
    CHECK(table.find("2\t0.2\t0.8\t0.72\n") != std::string::npos);
}
