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

// Single entry point wiring every module into subcommands. Reports and tables
// go to stdout; the run manifest and diagnostics go to stderr. Exit codes:
// 0 success, 1 usage error, 2 data/model error, 3 numeric failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "seed/checkpoint.hpp"
#include "seed/corpus.hpp"
#include "seed/error.hpp"
#include "seed/eval.hpp"
#include "seed/inference.hpp"
#include "seed/manifest.hpp"
#include "seed/network.hpp"
#include "seed/pipeline.hpp"
#include "seed/schedule.hpp"
#include "seed/training.hpp"
#include "seed/version.hpp"

namespace fs = std::filesystem;
using namespace seed;

namespace {

// --threads wins; otherwise SEED_THREADS; otherwise 0 (= hardware).
int resolve_threads_flag(const CLI::Option* opt, int value) {
    if (opt != nullptr && opt->count() > 0) return value;
    if (const char* env = std::getenv("SEED_THREADS")) {
        char* end = nullptr;
        const long parsed = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || parsed < 0) {
            throw ConfigError("SEED_THREADS must be a non-negative integer, got '" +
                              std::string(env) + "'");
        }
        return static_cast<int>(parsed);
    }
    return value;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        const std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
        return d.count();
    }
};

void add_synth_options(CLI::App* cmd, SynthConfig& sc) {
    cmd->add_option("--dim", sc.dim, "embedding dimension");
    cmd->add_option("--speakers", sc.n_speakers, "number of speakers");
    cmd->add_option("--utts", sc.utts_per_speaker, "utterances per speaker");
    cmd->add_option("--variants", sc.variants, "noisy variants per utterance");
    cmd->add_option("--within-sigma", sc.within_speaker_sigma, "within-speaker spread");
    cmd->add_option("--environments", sc.n_environments, "environment direction count");
    cmd->add_option("--env-gain-low", sc.env_gain_low, "environment gain lower bound");
    cmd->add_option("--env-gain-high", sc.env_gain_high, "environment gain upper bound");
    cmd->add_option("--iso-sigma", sc.iso_noise_sigma, "isotropic noise sigma");
    cmd->add_option("--holdout", sc.holdout_fraction, "holdout fraction in (0,1)");
}

void manifest_synth_config(RunManifest& man, const SynthConfig& sc) {
    man.set("dim", sc.dim);
    man.set("speakers", sc.n_speakers);
    man.set("utts", sc.utts_per_speaker);
    man.set("variants", sc.variants);
    man.set("within_sigma", sc.within_speaker_sigma);
    man.set("environments", sc.n_environments);
    man.set("env_gain_low", sc.env_gain_low);
    man.set("env_gain_high", sc.env_gain_high);
    man.set("iso_sigma", sc.iso_noise_sigma);
    man.set("holdout", sc.holdout_fraction);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"embedding-level denoising for speaker verification"};
    app.set_version_flag("--version", std::string("seed ") + kVersion);
    app.require_subcommand(1);

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "generate a synthetic mismatch corpus");
    SynthConfig synth_cfg;
    std::string synth_out;
    synth->add_option("--out", synth_out, "output corpus directory")->required();
    add_synth_options(synth, synth_cfg);
    synth->add_option("--seed", synth_cfg.seed, "generation seed");
    synth->callback([&] {
        Timer timer;
        const LabeledCorpus corpus = generate_corpus(synth_cfg);
        write_corpus_dir(corpus, synth_out);
        std::printf("groups=%zu variants=%d dim=%d out=%s\n", corpus.groups.size(),
                    corpus.variants, synth_cfg.dim, synth_out.c_str());
        RunManifest man;
        man.subcommand = "synth";
        manifest_synth_config(man, synth_cfg);
        man.set("seed", synth_cfg.seed);
        man.set("out", synth_out);
        man.duration_seconds = timer.seconds();
        emit_manifest(man);
    });

    // ---- train ----
    auto* train_cmd = app.add_subcommand("train", "train a denoiser on a corpus directory");
    TrainConfig train_cfg;
    std::string train_corpus, train_out, train_history;
    int train_variants = 3;
    double train_beta_start = 0.00085, train_beta_end = 0.012;
    int train_threads = 0;
    std::string train_loss = "mse";
    train_cmd->add_option("--corpus", train_corpus, "corpus directory")->required();
    train_cmd->add_option("--out", train_out, "checkpoint output path")->required();
    train_cmd->add_option("--history", train_history,
                          "loss history path (default <out>.history.tsv)");
    train_cmd->add_option("--epochs", train_cfg.epochs, "training epochs");
    train_cmd->add_option("--lr", train_cfg.lr, "learning rate");
    train_cmd->add_option("--wd", train_cfg.weight_decay, "decoupled weight decay");
    train_cmd->add_option("--batch-groups", train_cfg.groups_per_batch, "groups per batch");
    auto* train_variants_opt =
        train_cmd->add_option("--variants", train_variants, "noisy variants to load");
    train_cmd->add_option("--T", train_cfg.T, "schedule steps");
    train_cmd->add_option("--seed", train_cfg.seed, "training seed");
    train_cmd->add_option("--loss", train_loss, "loss kind: mse | l2");
    train_cmd->add_option("--blocks", train_cfg.n_blocks, "residual block count");
    train_cmd->add_option("--temb-dim", train_cfg.temb_dim,
                          "timestep embedding dim (0 = embedding dim)");
    train_cmd->add_option("--beta-start", train_beta_start, "schedule beta start");
    train_cmd->add_option("--beta-end", train_beta_end, "schedule beta end");
    train_cmd->add_option("--max-seconds", train_cfg.max_seconds,
                          "wall-clock cap checked at epoch boundaries (0 = off)");
    train_cmd->add_flag("--lr-decay", train_cfg.lr_linear_decay, "linear lr decay to 0");
    train_cmd->add_flag("--deterministic", train_cfg.deterministic,
                        "serial ordered reductions");
    auto* train_threads_opt =
        train_cmd->add_option("--threads", train_threads, "worker threads (0 = hardware)");
    train_cmd->callback([&] {
        Timer timer;
        train_cfg.loss_kind = parse_loss_kind(train_loss);
        train_cfg.threads = resolve_threads_flag(train_threads_opt, train_threads);
        const int variants = train_variants_opt->count() > 0 ? train_variants : 0;
        const std::vector<PairGroup<float>> groups = read_corpus_groups(train_corpus, variants);
        const NoiseSchedule schedule =
            make_scaled_linear_schedule(train_cfg.T, train_beta_start, train_beta_end);
        const TrainResult<float> result = train(groups, train_cfg, schedule);
        save_checkpoint(train_out, result.model, schedule);
        const std::string history_path =
            train_history.empty() ? train_out + ".history.tsv" : train_history;
        write_history_file(history_path, result.history);
        std::printf("epochs_run=%d first_epoch_loss=%.9g final_epoch_loss=%.9g out=%s\n",
                    result.epochs_run, result.history.front(), result.history.back(),
                    train_out.c_str());

        RunManifest man;
        man.subcommand = "train";
        man.set("corpus", train_corpus);
        man.set("epochs", train_cfg.epochs);
        man.set("lr", train_cfg.lr);
        man.set("wd", train_cfg.weight_decay);
        man.set("batch_groups", train_cfg.groups_per_batch);
        man.set("variants", static_cast<int>(groups.front().noisy.size()));
        man.set("T", train_cfg.T);
        man.set("beta_start", train_beta_start);
        man.set("beta_end", train_beta_end);
        man.set("seed", train_cfg.seed);
        man.set("loss", loss_kind_name(train_cfg.loss_kind));
        man.set("blocks", train_cfg.n_blocks);
        man.set("temb_dim", train_cfg.temb_dim);
        man.set("lr_decay", train_cfg.lr_linear_decay);
        man.set("deterministic", train_cfg.deterministic);
        man.set("threads", train_cfg.threads);
        man.add_input((fs::path(train_corpus) / "clean.emb").string());
        for (size_t k = 0; k < groups.front().noisy.size(); ++k) {
            man.add_input((fs::path(train_corpus) / ("noisy_" + std::to_string(k) + ".emb"))
                              .string());
        }
        man.duration_seconds = timer.seconds();
        emit_manifest(man);
    });

    // ---- enhance ----
    auto* enh = app.add_subcommand("enhance", "apply a trained model to an embedding file");
    InferenceConfig enh_cfg;
    std::string enh_model, enh_in, enh_out;
    int enh_threads = 0;
    enh->add_option("--model", enh_model, "SEEDCKPT checkpoint")->required();
    enh->add_option("--in", enh_in, "input EMB1 file")->required();
    enh->add_option("--out", enh_out, "output EMB1 file")->required();
    enh->add_option("--t", enh_cfg.t_infer, "inference timestep");
    enh->add_option("--steps", enh_cfg.steps, "DDIM refinement steps");
    enh->add_flag("--ensemble", enh_cfg.ensemble, "add the raw embedding to the output");
    enh->add_flag("--noise-first", enh_cfg.noise_first,
                  "forward-noise inputs to t before denoising (ablation)");
    enh->add_option("--seed", enh_cfg.seed, "noise seed for --noise-first");
    auto* enh_threads_opt =
        enh->add_option("--threads", enh_threads, "worker threads (0 = hardware)");
    enh->callback([&] {
        Timer timer;
        const Checkpoint ckpt = load_checkpoint(enh_model);
        const NoiseSchedule schedule = ckpt.make_schedule();
        const EmbeddingFile in = read_embedding_file(enh_in);
        const int threads = resolve_threads_flag(enh_threads_opt, enh_threads);
        const std::vector<std::vector<float>> out =
            enhance_batch(ckpt.model, in.embeddings, schedule, enh_cfg, threads);
        write_embedding_file(enh_out, in.ids, out);
        std::printf("enhanced=%zu dim=%d t=%d steps=%d ensemble=%d out=%s\n", out.size(),
                    ckpt.model.dim, enh_cfg.t_infer, enh_cfg.steps, enh_cfg.ensemble ? 1 : 0,
                    enh_out.c_str());

        RunManifest man;
        man.subcommand = "enhance";
        man.set("model", enh_model);
        man.set("in", enh_in);
        man.set("out", enh_out);
        man.set("t", enh_cfg.t_infer);
        man.set("steps", enh_cfg.steps);
        man.set("ensemble", enh_cfg.ensemble);
        man.set("noise_first", enh_cfg.noise_first);
        man.set("seed", enh_cfg.seed);
        man.set("threads", threads);
        man.add_input(enh_model);
        man.add_input(enh_in);
        man.duration_seconds = timer.seconds();
        emit_manifest(man);
    });

    // ---- eval ----
    auto* ev = app.add_subcommand("eval", "score a trial list with EER and minDCF");
    std::string ev_emb, ev_emb2, ev_trials;
    DcfParams dcf;
    int ev_threads = 0;
    ev->add_option("--emb", ev_emb, "EMB1 file resolving id_a (and id_b without --emb2)")
        ->required();
    ev->add_option("--emb2", ev_emb2, "EMB1 file resolving id_b");
    ev->add_option("--trials", ev_trials, "trial list file")->required();
    ev->add_option("--p-target", dcf.p_target, "target prior");
    ev->add_option("--c-miss", dcf.c_miss, "miss cost");
    ev->add_option("--c-fa", dcf.c_fa, "false-accept cost");
    auto* ev_threads_opt =
        ev->add_option("--threads", ev_threads, "worker threads (0 = hardware)");
    ev->callback([&] {
        Timer timer;
        const EmbMap map_a = embedding_map(read_embedding_file(ev_emb));
        const EmbMap map_b = ev_emb2.empty() ? map_a : embedding_map(read_embedding_file(ev_emb2));
        const TrialList trials = read_trial_file(ev_trials);
        const int threads = resolve_threads_flag(ev_threads_opt, ev_threads);
        const ScoreSet scores = score_trials(map_a, map_b, trials, threads);
        const EerResult eer = compute_eer(scores);
        const DcfResult mdcf = compute_min_dcf(scores, dcf);
        std::printf("EER=%.6f minDCF=%.6f threshold_eer=%.9g threshold_dcf=%.9g\n",
                    eer.eer * 100.0, mdcf.min_dcf, eer.threshold, mdcf.threshold);

        RunManifest man;
        man.subcommand = "eval";
        man.set("emb", ev_emb);
        if (!ev_emb2.empty()) man.set("emb2", ev_emb2);
        man.set("trials", ev_trials);
        man.set("p_target", dcf.p_target);
        man.set("c_miss", dcf.c_miss);
        man.set("c_fa", dcf.c_fa);
        man.set("threads", threads);
        man.add_input(ev_emb);
        if (!ev_emb2.empty()) man.add_input(ev_emb2);
        man.add_input(ev_trials);
        man.duration_seconds = timer.seconds();
        emit_manifest(man);
    });

    // ---- schedule ----
    auto* sch = app.add_subcommand("schedule", "inspect a scaled-linear noise schedule");
    int sch_T = 1000;
    double sch_bs = 0.00085, sch_be = 0.012;
    bool sch_dump = false;
    sch->add_option("--T", sch_T, "schedule steps");
    sch->add_option("--beta-start", sch_bs, "beta start");
    sch->add_option("--beta-end", sch_be, "beta end");
    sch->add_flag("--dump", sch_dump, "print the full t/beta/alpha/alpha_bar table");
    sch->callback([&] {
        Timer timer;
        const NoiseSchedule s = make_scaled_linear_schedule(sch_T, sch_bs, sch_be);
        if (sch_dump) {
            std::fputs(format_schedule_table(s).c_str(), stdout);
        } else {
            std::printf("T=%d beta_start=%.12g beta_end=%.12g alpha_bar_final=%.12g\n", s.steps,
                        s.beta_start, s.beta_end, s.alpha_bar.back());
        }
        RunManifest man;
        man.subcommand = "schedule";
        man.set("T", sch_T);
        man.set("beta_start", sch_bs);
        man.set("beta_end", sch_be);
        man.set("dump", sch_dump);
        man.duration_seconds = timer.seconds();
        emit_manifest(man);
    });

    // ---- gradcheck ----
    auto* gc = app.add_subcommand("gradcheck",
                                  "compare analytic gradients against finite differences");
    GradCheckConfig gc_cfg;
    int gc_max_blocks = 3;
    double gc_tol = 1e-5;
    gc->add_option("--dim", gc_cfg.dim, "embedding dim");
    gc->add_option("--temb-dim", gc_cfg.temb_dim, "timestep embedding dim");
    gc->add_option("--max-blocks", gc_max_blocks, "check block counts 1..max");
    gc->add_option("--seeds", gc_cfg.seeds, "random model seeds per block count");
    gc->add_option("--timesteps", gc_cfg.timesteps, "random (input, t) draws per model");
    gc->add_option("--step", gc_cfg.fd_step, "finite-difference step");
    gc->add_option("--tol", gc_tol, "max allowed relative error");
    gc->callback([&] {
        Timer timer;
        if (gc_max_blocks < 1) throw ConfigError("gradcheck: --max-blocks must be >= 1");
        gc_cfg.block_counts.clear();
        for (int b = 1; b <= gc_max_blocks; ++b) gc_cfg.block_counts.push_back(b);
        const GradCheckResult res = gradient_check(gc_cfg);
        std::printf("max_rel_error=%.6e checked_params=%ld worst_tensor=%s tol=%.1e\n",
                    res.max_rel_error, res.checked_params,
                    res.worst_tensor.empty() ? "-" : res.worst_tensor.c_str(), gc_tol);
        RunManifest man;
        man.subcommand = "gradcheck";
        man.set("dim", gc_cfg.dim);
        man.set("temb_dim", gc_cfg.temb_dim);
        man.set("max_blocks", gc_max_blocks);
        man.set("seeds", gc_cfg.seeds);
        man.set("timesteps", gc_cfg.timesteps);
        man.set("step", gc_cfg.fd_step);
        man.set("tol", gc_tol);
        man.duration_seconds = timer.seconds();
        emit_manifest(man);
        if (res.max_rel_error > gc_tol) {
            throw NumericError("gradient check failed: max relative error " +
                               std::to_string(res.max_rel_error) + " in tensor " +
                               res.worst_tensor);
        }
    });

    // ---- pipeline ----
    auto* pipe = app.add_subcommand(
        "pipeline", "synth -> train -> enhance -> eval end-to-end experiment");
    PipelineConfig pc;
    pc.train.groups_per_batch = 16;  // small batches: enough optimizer steps at desk scale
    pc.train.max_seconds = 540.0;    // CI guard; the experiment itself runs in seconds
    int pipe_threads = 0;
    std::string pipe_loss = "mse";
    pipe->add_option("--seed", pc.seed, "master seed");
    pipe->add_option("--out", pc.out_dir, "artifact directory (optional)");
    add_synth_options(pipe, pc.synth);
    pipe->add_option("--epochs", pc.train.epochs, "training epochs");
    pipe->add_option("--lr", pc.train.lr, "learning rate");
    pipe->add_option("--wd", pc.train.weight_decay, "decoupled weight decay");
    pipe->add_option("--batch-groups", pc.train.groups_per_batch, "groups per batch");
    pipe->add_option("--T", pc.train.T, "schedule steps");
    pipe->add_option("--loss", pipe_loss, "loss kind: mse | l2");
    pipe->add_option("--blocks", pc.train.n_blocks, "residual block count");
    pipe->add_option("--temb-dim", pc.train.temb_dim,
                     "timestep embedding dim (0 = embedding dim)");
    pipe->add_option("--beta-start", pc.beta_start, "schedule beta start");
    pipe->add_option("--beta-end", pc.beta_end, "schedule beta end");
    pipe->add_option("--max-seconds", pc.train.max_seconds,
                     "training wall-clock cap (0 = off)");
    pipe->add_flag("--lr-decay", pc.train.lr_linear_decay, "linear lr decay to 0");
    pipe->add_option("--t", pc.infer.t_infer, "inference timestep");
    pipe->add_option("--steps", pc.infer.steps, "DDIM refinement steps");
    bool pipe_no_ensemble = false;
    pipe->add_flag("--no-ensemble", pipe_no_ensemble,
                   "score the bare denoiser output instead of input + output");
    pipe->add_flag("--noise-first", pc.infer.noise_first,
                   "forward-noise inputs before denoising (ablation)");
    pipe->add_option("--p-target", pc.dcf.p_target, "target prior");
    pipe->add_option("--c-miss", pc.dcf.c_miss, "miss cost");
    pipe->add_option("--c-fa", pc.dcf.c_fa, "false-accept cost");
    pipe->add_flag("--deterministic", pc.deterministic, "serial ordered reductions");
    auto* pipe_threads_opt =
        pipe->add_option("--threads", pipe_threads, "worker threads (0 = hardware)");
    pipe->callback([&] {
        Timer timer;
        pc.train.loss_kind = parse_loss_kind(pipe_loss);
        pc.infer.ensemble = !pipe_no_ensemble;  // the summed embedding is the default output
        pc.threads = resolve_threads_flag(pipe_threads_opt, pipe_threads);
        const PipelineReport report = run_pipeline(pc);
        std::fputs(pipeline_report_text(report).c_str(), stdout);

        RunManifest man;
        man.subcommand = "pipeline";
        man.set("seed", pc.seed);
        manifest_synth_config(man, pc.synth);
        man.set("epochs", pc.train.epochs);
        man.set("lr", pc.train.lr);
        man.set("wd", pc.train.weight_decay);
        man.set("batch_groups", pc.train.groups_per_batch);
        man.set("T", pc.train.T);
        man.set("loss", loss_kind_name(pc.train.loss_kind));
        man.set("blocks", pc.train.n_blocks);
        man.set("beta_start", pc.beta_start);
        man.set("beta_end", pc.beta_end);
        man.set("t_infer", pc.infer.t_infer);
        man.set("steps", pc.infer.steps);
        man.set("ensemble", pc.infer.ensemble);
        man.set("noise_first", pc.infer.noise_first);
        man.set("p_target", pc.dcf.p_target);
        man.set("c_miss", pc.dcf.c_miss);
        man.set("c_fa", pc.dcf.c_fa);
        man.set("deterministic", pc.deterministic);
        man.set("threads", pc.threads);
        if (!pc.out_dir.empty()) man.set("out", pc.out_dir);
        man.duration_seconds = timer.seconds();
        emit_manifest(man);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
