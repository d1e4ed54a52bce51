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
#include <set>
#include <vector>

#include "doctest.h"
#include "seed/error.hpp"
#include "seed/network.hpp"
#include "seed/rng.hpp"
#include "test_util.hpp"

using namespace seed;
using testutil::ld;

TEST_CASE("sinusoidal embedding at t=0 alternates 0 and 1") {
    const std::vector<double> pe = sinusoidal_timestep_embedding<double>(0, 8);
    for (int i = 0; i < 8; i += 2) {
        CHECK(pe[static_cast<size_t>(i)] == 0.0);
        CHECK(pe[static_cast<size_t>(i + 1)] == 1.0);
    }
}

TEST_CASE("sinusoidal embedding matches scalar oracle at t=50, E=8") {
    const std::vector<double> pe = sinusoidal_timestep_embedding<double>(50, 8);
    const std::vector<ld> want = testutil::ref_sinusoid(50, 8);
    CHECK(testutil::max_rel_vec_err(
              pe, std::vector<double>(want.begin(), want.end())) <= 1e-14);
    // Spot values from the closed form: pair i uses frequency 10000^(-2i/8).
    CHECK(pe[0] == doctest::Approx(std::sin(50.0)).epsilon(1e-14));
    CHECK(pe[1] == doctest::Approx(std::cos(50.0)).epsilon(1e-14));
    CHECK(pe[2] == doctest::Approx(std::sin(50.0 * 1e-1)).epsilon(1e-12));
    CHECK(pe[6] == doctest::Approx(std::sin(50.0 * 1e-3)).epsilon(1e-12));
}

TEST_CASE("sinusoidal embedding validates its arguments") {
    CHECK_THROWS_AS(sinusoidal_timestep_embedding<double>(1, 7), ConfigError);
    CHECK_THROWS_AS(sinusoidal_timestep_embedding<double>(-1, 8), DataError);
}

TEST_CASE("model_forward matches the scalar long-double oracle") {
    Rng rng(101);
    for (int n_blocks : {1, 2, 3}) {
        ModelParams<double> m = allocate_params<double>(8, 4, n_blocks);
        testutil::randomize_params(m, rng);
        for (int t : {1, 50, 997}) {
            const std::vector<double> e = rng.gaussian_vector<double>(8);
            const std::vector<double> got = model_forward<double>(m, e, t);
            const std::vector<ld> want =
                testutil::ref_model_forward(m, std::vector<ld>(e.begin(), e.end()), t);
            CHECK(testutil::max_rel_vec_err(
                      got, std::vector<double>(want.begin(), want.end())) <= 1e-12);
        }
    }
}

TEST_CASE("float forward agrees with the double oracle to float precision") {
    Rng rng(55);
    ModelParams<double> md = allocate_params<double>(16, 16, 3);
    testutil::randomize_params(md, rng);
    const ModelParams<float> mf = convert_params<float>(md);
    const std::vector<double> e = rng.gaussian_vector<double>(16);
    const std::vector<float> ef(e.begin(), e.end());
    const std::vector<float> got = model_forward<float>(mf, ef, 50);
    const std::vector<double> want = model_forward<double>(md, e, 50);
    CHECK(testutil::max_rel_vec_err(got, want) <= 1e-3);
}

TEST_CASE("standardize and destandardize are inverse at the boundary") {
    Rng rng(9);
    ModelParams<double> m = allocate_params<double>(6, 4, 1);
    testutil::randomize_params(m, rng);
    const std::vector<double> e = rng.gaussian_vector<double>(6);
    const std::vector<double> round = destandardize<double>(m, standardize<double>(m, e));
    CHECK(testutil::max_rel_vec_err(round, e) <= 1e-14);
}

TEST_CASE("freshly initialized model is the exact identity") {
    Rng seeds(1234);
    for (int rep = 0; rep < 50; ++rep) {
        const int dim = 4 + static_cast<int>(seeds.uniform_int(1, 60));
        ModelParams<double> m = init_params<double>(dim, 8, 3, seeds.next_u64());
        Rng rng(seeds.next_u64());
        const std::vector<double> e = rng.gaussian_vector<double>(dim);
        const int t = static_cast<int>(rng.uniform_int(0, 1000));
        const std::vector<double> out = model_forward<double>(m, e, t);
        double worst = 0.0;
        for (size_t i = 0; i < out.size(); ++i) {
            worst = std::max(worst, std::fabs(out[i] - e[i]));
        }
        CHECK(worst == 0.0);
    }
}

TEST_CASE("collect_tensors has a stable order with unique names") {
    ModelParams<double> m = allocate_params<double>(4, 4, 2);
    auto refs = collect_tensors(m);
    // 2 blocks x 6 tensors x (w,b or gain,bias) + temb mlps + final stage.
    CHECK(refs.size() == 2 * 12 + 4 + 4);
    std::set<std::string> names;
    for (const auto& r : refs) names.insert(r.name);
    CHECK(names.size() == refs.size());
    CHECK(refs.front().name == "blocks[0].in_norm.gain");
    CHECK(refs.back().name == "final_weight.b");

    Gradients<double> g = make_gradients(m);
    auto grefs = collect_tensors(g);
    REQUIRE(grefs.size() == refs.size());
    for (size_t i = 0; i < refs.size(); ++i) {
        CHECK(grefs[i].name == refs[i].name);
        CHECK(grefs[i].data->size() == refs[i].data->size());
        CHECK(grefs[i].kind == refs[i].kind);
    }
}

TEST_CASE("weight decay classification covers weight matrices only") {
    ModelParams<double> m = allocate_params<double>(4, 4, 1);
    for (const auto& r : collect_tensors(m)) {
        const bool ends_w = r.name.size() >= 2 && r.name.substr(r.name.size() - 2) == ".w";
        CHECK(is_decayed(r.kind) == ends_w);
    }
}

TEST_CASE("analytic gradients match finite differences on a small model") {
    Rng rng(77);
    ModelParams<double> m = allocate_params<double>(5, 4, 2);
    testutil::randomize_params(m, rng);
    const std::vector<double> e = rng.gaussian_vector<double>(5);
    const std::vector<double> out_grad = rng.gaussian_vector<double>(5);
    const int t = 17;

    Gradients<double> g = make_gradients(m);
    model_backward<double>(m, e, t, out_grad, g);

    auto params = collect_tensors(m);
    auto grads = collect_tensors(g);
    const double h = 1e-6;
    double worst = 0.0;
    for (size_t ti = 0; ti < params.size(); ++ti) {
        std::vector<double>& theta = *params[ti].data;
        for (size_t j = 0; j < theta.size(); ++j) {
            const double save = theta[j];
            auto objective = [&] {
                const std::vector<double> out = model_forward<double>(m, e, t);
                double acc = 0.0;
                for (size_t i = 0; i < out.size(); ++i) acc += out_grad[i] * out[i];
                return acc;
            };
            theta[j] = save + h;
            const double up = objective();
            theta[j] = save - h;
            const double down = objective();
            theta[j] = save;
            const double fd = (up - down) / (2.0 * h);
            const double an = (*grads[ti].data)[j];
            worst = std::max(worst, std::fabs(an - fd) /
                                        std::max({std::fabs(an), std::fabs(fd), 1e-2}));
        }
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("library gradient check passes its own tolerance") {
    GradCheckConfig cfg;
    const GradCheckResult r = gradient_check(cfg);
    CHECK(r.max_rel_error <= 1e-5);
    CHECK(r.checked_params > 0);
}

TEST_CASE("allocate_params validates hyperparameters") {
    CHECK_THROWS_AS(allocate_params<double>(0, 4, 1), ConfigError);
    CHECK_THROWS_AS(allocate_params<double>(4, 3, 1), ConfigError);
    CHECK_THROWS_AS(allocate_params<double>(4, 0, 1), ConfigError);
    CHECK_THROWS_AS(allocate_params<double>(4, 4, 0), ConfigError);
}

TEST_CASE("hidden width is twice the embedding dim") {
    const ModelParams<double> m = allocate_params<double>(12, 8, 1);
    CHECK(m.blocks[0].in_weight.out_dim == 24);
    CHECK(m.blocks[0].in_weight.in_dim == 12);
    CHECK(m.blocks[0].temb_weight.out_dim == 24);
    CHECK(m.blocks[0].temb_weight.in_dim == 8);
    CHECK(m.blocks[0].out_weight.out_dim == 12);
    CHECK(m.blocks[0].out_weight.in_dim == 24);
    CHECK(m.final_weight.out_dim == 12);
    CHECK(m.final_weight.in_dim == 12);
}

TEST_CASE("model_forward rejects mismatched input dims") {
    ModelParams<double> m = allocate_params<double>(4, 4, 1);
    const std::vector<double> e(5, 0.0);
    CHECK_THROWS_AS(model_forward<double>(m, e, 1), DataError);
}
