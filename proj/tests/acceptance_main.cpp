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

// Acceptance suite: nine go/no-go checks, one line each, covering schedule
// math, diffusion algebra, gradients, loss structure, the end-to-end
// synthetic mismatch experiment, metric oracles, and determinism. Exits
// nonzero if any criterion fails. Criteria 7 and 9 spawn the real CLI binary
// (path compiled in as SEED_BIN).

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "seed/checkpoint.hpp"
#include "seed/corpus.hpp"
#include "seed/eval.hpp"
#include "seed/inference.hpp"
#include "seed/network.hpp"
#include "seed/rng.hpp"
#include "seed/schedule.hpp"
#include "seed/training.hpp"
#include "test_util.hpp"

using namespace seed;
using testutil::ld;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

// ---------------------------------------------------------------------------
// Subprocess plumbing
// ---------------------------------------------------------------------------

int run_command(const std::string& cmd, const std::string& stdout_path) {
    const std::string full = cmd + " > " + stdout_path + " 2> /dev/null";
    const int status = std::system(full.c_str());
    if (status == -1) return -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) return {};
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

bool same_bytes(const std::string& a, const std::string& b) {
    return slurp(a) == slurp(b) && !slurp(a).empty();
}

// Pulls the eer_pct column out of a report table line like
// "clean-noisy<TAB>raw<TAB>1.698156<TAB>...".
double table_eer(const std::string& report, const std::string& trialset,
                 const std::string& condition) {
    const std::string key = trialset + "\t" + condition + "\t";
    const size_t pos = report.find(key);
    if (pos == std::string::npos) {
        throw std::runtime_error("report is missing row " + trialset + "/" + condition);
    }
    return std::strtod(report.c_str() + pos + key.size(), nullptr);
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

Outcome criterion_schedule() {
    const int T = 1000;
    const double bs = 0.00085, be = 0.012;
    const NoiseSchedule s = make_scaled_linear_schedule(T, bs, be);

    const ld rs = std::sqrt(static_cast<ld>(bs));
    const ld re = std::sqrt(static_cast<ld>(be));
    ld prod = 1.0L;
    double worst = 0.0;
    bool decreasing = true;
    for (int t = 1; t <= T; ++t) {
        const ld root = rs + static_cast<ld>(t - 1) / static_cast<ld>(T - 1) * (re - rs);
        prod *= 1.0L - root * root;
        worst = std::max(worst, testutil::rel_err(s.alpha_bar_at(t), static_cast<double>(prod)));
        decreasing = decreasing && s.alpha_bar_at(t) < s.alpha_bar_at(t - 1);
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "max alpha_bar rel err %.3e (tol 1e-12), %s",
                  worst, decreasing ? "strictly decreasing" : "NOT DECREASING");
    return {worst <= 1e-12 && decreasing, buf};
}

Outcome criterion_diffusion_algebra() {
    const NoiseSchedule s = make_scaled_linear_schedule(1000, 0.00085, 0.012);
    Rng rng(1001);
    double worst_rt = 0.0;
    for (int d : {16, 192, 256, 512}) {
        for (int rep = 0; rep < 100; ++rep) {
            const std::vector<float> x0 = rng.gaussian_vector<float>(d);
            const std::vector<float> eps = rng.gaussian_vector<float>(d);
            const int t = static_cast<int>(rng.uniform_int(1, 1000));
            const std::vector<float> back =
                x0_from_eps<float>(forward_diffuse<float>(x0, eps, t, s), eps, t, s);
            worst_rt = std::max(worst_rt, testutil::max_rel_vec_err(back, x0));
        }
    }

    // Scaled-noise identity evaluated in 64-bit: the subtraction cancels to
    // the noise floor of whatever precision the states carry, so the identity
    // itself is checked above float rounding.
    double worst_id = 0.0;
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
        worst_id = std::max(worst_id, testutil::max_rel_vec_err(lhs, rhs));
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "round-trip rel err %.3e (tol 1e-5), shared-noise rel err %.3e (tol 1e-6)",
                  worst_rt, worst_id);
    return {worst_rt <= 1e-5 && worst_id <= 1e-6, buf};
}

Outcome criterion_oracle_ddim() {
    const NoiseSchedule s = make_scaled_linear_schedule(1000, 0.00085, 0.012);
    Rng rng(1003);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const std::vector<float> x0 = rng.gaussian_vector<float>(64);
        const std::vector<float> eps = rng.gaussian_vector<float>(64);
        const std::vector<float> y = forward_diffuse<float>(x0, eps, 1000, s);
        const std::vector<float> out = ddim_refine<float>(
            y, 1000, 4, s, [&](std::span<const float>, int) { return x0; });
        worst = std::max(worst, testutil::max_rel_vec_err(out, x0));
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "perfect-predictor recovery rel err %.3e (tol 1e-5)", worst);
    return {worst <= 1e-5, buf};
}

Outcome criterion_gradcheck() {
    GradCheckConfig cfg;  // D=6, E=4, blocks {1,2,3}, 3 seeds x 3 timesteps
    const GradCheckResult r = gradient_check(cfg);
    char buf[160];
    std::snprintf(buf, sizeof(buf), "max rel grad err %.3e over %zu params (tol 1e-5), worst %s",
                  r.max_rel_error, r.checked_params, r.worst_tensor.c_str());
    return {r.max_rel_error <= 1e-5, buf};
}

Outcome criterion_identity_at_init() {
    Rng seeds(1005);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const int dim = 4 + static_cast<int>(seeds.uniform_int(1, 28));
        const ModelParams<double> m = init_params<double>(dim, 8, 3, seeds.next_u64());
        Rng rng(seeds.next_u64());
        const std::vector<double> e = rng.gaussian_vector<double>(dim);
        const int t = static_cast<int>(rng.uniform_int(0, 1000));
        const std::vector<double> out = model_forward<double>(m, e, t);
        for (size_t i = 0; i < out.size(); ++i) {
            worst = std::max(worst, std::fabs(out[i] - e[i]));
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "max |f(e,t) - e| = %g over 50 cases (must be 0)", worst);
    return {worst == 0.0, buf};
}

Outcome criterion_loss_structure() {
    const NoiseSchedule s = make_scaled_linear_schedule(1000, 0.00085, 0.012);
    Rng rng(1006);
    ModelParams<double> m = allocate_params<double>(6, 4, 2);
    testutil::randomize_params(m, rng);

    PairGroup<double> g;
    g.group_id = "acc";
    g.clean = rng.gaussian_vector<double>(6);
    for (int k = 0; k < 3; ++k) g.noisy.push_back(rng.gaussian_vector<double>(6));
    const std::vector<double> eps = rng.gaussian_vector<double>(6);
    const int t = 137;

    Gradients<double> grads = make_gradients(m);
    SeedLossTrace<double> trace;
    const double got = seed_loss<double>(m, g, t, eps, s, LossKind::Mse, grads, &trace);

    // Scalar-loop oracle: four independent reconstruction distances in
    // standardized coordinates, summed in extended precision.
    auto term = [&](const std::vector<double>& member) {
        const size_t n = member.size();
        std::vector<ld> z(n), zc(n);
        for (size_t i = 0; i < n; ++i) {
            z[i] = (static_cast<ld>(member[i]) - m.std_mean[i]) / m.std_scale[i];
            zc[i] = (static_cast<ld>(g.clean[i]) - m.std_mean[i]) / m.std_scale[i];
        }
        const ld ra = std::sqrt(static_cast<ld>(s.alpha_bar_at(t)));
        const ld ro = std::sqrt(1.0L - static_cast<ld>(s.alpha_bar_at(t)));
        std::vector<ld> state(n);
        for (size_t i = 0; i < n; ++i) state[i] = ra * z[i] + ro * eps[i];
        const std::vector<ld> f = testutil::ref_model_forward_std(m, state, t);
        ld acc = 0.0L;
        for (size_t i = 0; i < n; ++i) acc += (f[i] - zc[i]) * (f[i] - zc[i]);
        return acc / static_cast<ld>(n);
    };
    ld want = term(g.clean);
    for (const auto& v : g.noisy) want += term(v);

    const double rel = testutil::rel_err(got, static_cast<double>(want));
    char buf[160];
    std::snprintf(buf, sizeof(buf), "N=3 -> %zu terms, scalar-oracle rel err %.3e (tol 1e-6)",
                  trace.y_t.size() + 1, rel);
    return {rel <= 1e-6 && trace.y_t.size() == 3, buf};
}

Outcome criterion_end_to_end(const std::string& tmp) {
    const std::string out = tmp + "/pipe_stdout.txt";
    const std::string cmd = std::string(SEED_BIN) + " pipeline --seed 0 --deterministic";
    const auto start = std::chrono::steady_clock::now();
    const int rc = run_command(cmd, out);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (rc != 0) return {false, "pipeline exited with code " + std::to_string(rc)};

    const std::string report = slurp(out);
    const double raw_noisy = table_eer(report, "clean-noisy", "raw");
    const double enh_noisy = table_eer(report, "clean-noisy", "enhanced");
    const double raw_clean = table_eer(report, "clean-clean", "raw");
    const double enh_clean = table_eer(report, "clean-clean", "enhanced");

    const bool strictly_lower = enh_noisy < raw_noisy;
    const double reduction = (raw_noisy - enh_noisy) / raw_noisy * 100.0;
    const bool clean_ok = enh_clean <= raw_clean * 1.2;
    char buf[240];
    std::snprintf(buf, sizeof(buf),
                  "noisy EER %.4f%% -> %.4f%% (reduction %.1f%%, need >= 20%%), "
                  "clean EER %.4f%% -> %.4f%% (cap 1.2x), %.1f s (cap 600)",
                  raw_noisy, enh_noisy, reduction, raw_clean, enh_clean, secs);
    return {strictly_lower && reduction >= 20.0 && clean_ok && secs < 600.0, buf};
}

Outcome criterion_metric_oracles() {
    Rng rng(20260815);
    const DcfParams defaults{};
    int cases = 0, exact = 0;
    while (cases < 240) {
        const int n = 2 + static_cast<int>(rng.uniform_int(0, 10));
        ScoreSet s;
        int n_tgt = 0;
        for (int i = 0; i < n; ++i) {
            s.scores.push_back(static_cast<double>(rng.uniform_int(0, 10)) / 10.0);
            const uint8_t label = rng.uniform() < 0.5 ? 1 : 0;
            s.labels.push_back(label);
            n_tgt += label;
        }
        if (n_tgt == 0 || n_tgt == n) continue;
        ++cases;

        // Exhaustive brute force: every score as a threshold plus reject-all,
        // O(n^2) scalar counting, lowest threshold on ties.
        std::vector<double> cand = s.scores;
        cand.push_back(std::numeric_limits<double>::infinity());
        std::sort(cand.begin(), cand.end());
        double best_gap = std::numeric_limits<double>::infinity();
        double bf_eer = 0.0, bf_raw = std::numeric_limits<double>::infinity();
        const int n_non = n - n_tgt;
        for (double th : cand) {
            int fa = 0, fr = 0;
            for (size_t i = 0; i < s.scores.size(); ++i) {
                const bool accept = s.scores[i] >= th;
                if (s.labels[i] != 0 && !accept) ++fr;
                if (s.labels[i] == 0 && accept) ++fa;
            }
            const double far = static_cast<double>(fa) / static_cast<double>(n_non);
            const double frr = static_cast<double>(fr) / static_cast<double>(n_tgt);
            if (std::fabs(far - frr) < best_gap) {
                best_gap = std::fabs(far - frr);
                bf_eer = (far + frr) / 2.0;
            }
            const double raw = defaults.c_miss * defaults.p_target * frr +
                               defaults.c_fa * (1.0 - defaults.p_target) * far;
            bf_raw = std::min(bf_raw, raw);
        }
        const double bf_dcf =
            bf_raw / std::min(defaults.c_miss * defaults.p_target,
                              defaults.c_fa * (1.0 - defaults.p_target));

        if (compute_eer(s).eer == bf_eer && compute_min_dcf(s, defaults).min_dcf == bf_dcf) {
            ++exact;
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%d/%d lists match brute force exactly", exact, cases);
    return {exact == cases, buf};
}

Outcome criterion_determinism_and_formats(const std::string& tmp) {
    // Two full pipeline runs with artifacts must agree byte-for-byte.
    const std::string dir_a = tmp + "/run_a", dir_b = tmp + "/run_b";
    const std::string base = std::string(SEED_BIN) +
                             " pipeline --seed 7 --deterministic --epochs 8 --out ";
    if (run_command(base + dir_a, tmp + "/out_a.txt") != 0) {
        return {false, "first pipeline run failed"};
    }
    if (run_command(base + dir_b, tmp + "/out_b.txt") != 0) {
        return {false, "second pipeline run failed"};
    }
    bool identical = same_bytes(tmp + "/out_a.txt", tmp + "/out_b.txt");
    for (const char* f : {"model.ckpt", "enhanced.emb", "report.txt", "history.tsv",
                          "corpus/clean.emb", "corpus/noisy_0.emb"}) {
        identical = identical && same_bytes(dir_a + "/" + f, dir_b + "/" + f);
    }

    // EMB1 round-trip: read and rewrite an artifact, bytes must not change.
    const EmbeddingFile emb = read_embedding_file(dir_a + "/enhanced.emb");
    write_embedding_file(tmp + "/rt.emb", emb.ids, emb.embeddings);
    const bool emb_rt = same_bytes(dir_a + "/enhanced.emb", tmp + "/rt.emb");

    // SEEDCKPT round-trip.
    const Checkpoint ckpt = load_checkpoint(dir_a + "/model.ckpt");
    save_checkpoint(tmp + "/rt.ckpt", ckpt.model, ckpt.make_schedule());
    const bool ckpt_rt = same_bytes(dir_a + "/model.ckpt", tmp + "/rt.ckpt");

    // Corrupted inputs must be rejected, through the library and the CLI.
    bool rejected = true;
    {
        std::string bytes = slurp(dir_a + "/model.ckpt");
        bytes[0] ^= 0x01;
        std::ofstream out(tmp + "/bad.ckpt", std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        try {
            load_checkpoint(tmp + "/bad.ckpt");
            rejected = false;
        } catch (const DataError&) {
        }
        const int rc = run_command(std::string(SEED_BIN) + " enhance --model " + tmp +
                                       "/bad.ckpt --in " + dir_a + "/enhanced.emb --out " +
                                       tmp + "/never.emb",
                                   tmp + "/enh_out.txt");
        rejected = rejected && rc == 2;
    }
    {
        std::string bytes = slurp(dir_a + "/enhanced.emb");
        bytes.resize(bytes.size() - 3);
        std::ofstream out(tmp + "/bad.emb", std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        try {
            read_embedding_file(tmp + "/bad.emb");
            rejected = false;
        } catch (const DataError&) {
        }
    }

    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "double-run byte-identical: %s, EMB1 round-trip: %s, SEEDCKPT round-trip: %s, "
                  "corruption rejected: %s",
                  identical ? "yes" : "NO", emb_rt ? "yes" : "NO", ckpt_rt ? "yes" : "NO",
                  rejected ? "yes" : "NO");
    return {identical && emb_rt && ckpt_rt && rejected, buf};
}

}  // namespace

int main() {
    testutil::TempDir tmp("acceptance");

    struct Criterion {
        const char* name;
        double budget_seconds;
        std::function<Outcome()> run;
    };
    const std::string scratch = tmp.str();
    const std::vector<Criterion> criteria = {
        {"schedule oracle", 1.0, criterion_schedule},
        {"diffusion algebra", 5.0, criterion_diffusion_algebra},
        {"oracle DDIM", 1.0, criterion_oracle_ddim},
        {"gradient check", 60.0, criterion_gradcheck},
        {"identity at init", 1.0, criterion_identity_at_init},
        {"loss structure", 1.0, criterion_loss_structure},
        {"end-to-end mismatch experiment", 600.0,
         [&] { return criterion_end_to_end(scratch); }},
        {"metric oracles", 5.0, criterion_metric_oracles},
        {"determinism and formats", 60.0,
         [&] { return criterion_determinism_and_formats(scratch); }},
    };

    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = secs <= criteria[i].budget_seconds;
        const bool pass = o.pass && in_budget;
        std::printf("criterion %zu (%s): %s  [%.2f s]  %s%s\n", i + 1, criteria[i].name,
                    pass ? "PASS" : "FAIL", secs, o.detail.c_str(),
                    in_budget ? "" : "  [OVER TIME BUDGET]");
        if (!pass) ++failures;
    }
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all 9 criteria passed\n");
    return 0;
}
