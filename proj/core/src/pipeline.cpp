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

#include "seed/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "seed/checkpoint.hpp"

namespace fs = std::filesystem;

namespace seed {

namespace {

std::string variant_id(const std::string& group_id, int k) {
    return group_id + "#" + std::to_string(k);
}

ConditionMetrics score_condition(const EmbMap& emb, const TrialList& trials,
                                 const DcfParams& dcf, int threads) {
    const ScoreSet scores = score_trials(emb, trials, threads);
    const EerResult eer = compute_eer(scores);
    const DcfResult mdcf = compute_min_dcf(scores, dcf);
    return {eer.eer, mdcf.min_dcf, eer.threshold, mdcf.threshold};
}

void append_metrics(std::string& out, const char* trialset, const char* condition,
                    const ConditionMetrics& m) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%s\t%s\t%.6f\t%.6f\t%.9g\t%.9g\n", trialset, condition,
                  m.eer * 100.0, m.min_dcf, m.threshold_eer, m.threshold_dcf);
    out += buf;
}

}  // namespace

PipelineReport run_pipeline(const PipelineConfig& cfg) {
    SynthConfig synth = cfg.synth;
    synth.seed = Rng::derive(cfg.seed, 10);
    TrainConfig tc = cfg.train;
    tc.seed = Rng::derive(cfg.seed, 11);
    tc.deterministic = cfg.deterministic;
    tc.threads = cfg.threads;
    InferenceConfig ic = cfg.infer;
    ic.seed = Rng::derive(cfg.seed, 12);

    const LabeledCorpus corpus = generate_corpus(synth);
    std::vector<PairGroup<float>> train_groups;
    std::vector<const PairGroup<float>*> holdout;
    for (const auto& g : corpus.groups) {
        if (corpus.split.at(g.group_id) == Split::Train) {
            train_groups.push_back(g);
        } else {
            holdout.push_back(&g);
        }
    }
    if (train_groups.empty()) throw DataError("pipeline: empty train split");
    if (holdout.empty()) throw DataError("pipeline: empty holdout split");

    const NoiseSchedule schedule =
        make_scaled_linear_schedule(tc.T, cfg.beta_start, cfg.beta_end);
    const TrainResult<float> trained = train(train_groups, tc, schedule);

    // Held-out embeddings: raw, and enhanced with the same config on both the
    // clean and noisy sides (deployment enhances everything it scores).
    std::vector<std::vector<float>> clean_raw;
    std::vector<std::vector<float>> noisy_raw;
    clean_raw.reserve(holdout.size());
    for (const auto* g : holdout) {
        clean_raw.push_back(g->clean);
        for (const auto& v : g->noisy) noisy_raw.push_back(v);
    }
    const int threads = cfg.deterministic ? 1 : cfg.threads;
    const std::vector<std::vector<float>> clean_enh =
        enhance_batch(trained.model, clean_raw, schedule, ic, threads);
    const std::vector<std::vector<float>> noisy_enh =
        enhance_batch(trained.model, noisy_raw, schedule, ic, threads);

    EmbMap raw_map, enh_map;
    {
        size_t flat = 0;
        for (size_t i = 0; i < holdout.size(); ++i) {
            raw_map[holdout[i]->group_id] = clean_raw[i];
            enh_map[holdout[i]->group_id] = clean_enh[i];
            for (size_t k = 0; k < holdout[i]->noisy.size(); ++k, ++flat) {
                raw_map[variant_id(holdout[i]->group_id, static_cast<int>(k))] = noisy_raw[flat];
                enh_map[variant_id(holdout[i]->group_id, static_cast<int>(k))] = noisy_enh[flat];
            }
        }
    }

    // Trials over the holdout split only. Clean-vs-clean: all unordered
    // pairs. Clean-vs-noisy: every cross-utterance (clean, variant) pair;
    // same-utterance pairs are excluded as content-matched giveaways.
    TrialList trials_clean, trials_noisy;
    for (size_t i = 0; i < holdout.size(); ++i) {
        for (size_t j = i + 1; j < holdout.size(); ++j) {
            const bool target = corpus.speaker_of.at(holdout[i]->group_id) ==
                                corpus.speaker_of.at(holdout[j]->group_id);
            trials_clean.trials.push_back(
                {target, holdout[i]->group_id, holdout[j]->group_id, 0});
        }
    }
    for (size_t i = 0; i < holdout.size(); ++i) {
        for (size_t j = 0; j < holdout.size(); ++j) {
            if (i == j) continue;
            const bool target = corpus.speaker_of.at(holdout[i]->group_id) ==
                                corpus.speaker_of.at(holdout[j]->group_id);
            for (size_t k = 0; k < holdout[j]->noisy.size(); ++k) {
                trials_noisy.trials.push_back({target, holdout[i]->group_id,
                                               variant_id(holdout[j]->group_id,
                                                          static_cast<int>(k)),
                                               0});
            }
        }
    }

    PipelineReport report;
    report.groups_train = train_groups.size();
    report.groups_holdout = holdout.size();
    report.trials_clean = trials_clean.trials.size();
    report.trials_noisy = trials_noisy.trials.size();
    report.epochs_run = trained.epochs_run;
    report.first_epoch_loss = trained.history.front();
    report.final_epoch_loss = trained.history.back();
    report.raw_clean = score_condition(raw_map, trials_clean, cfg.dcf, threads);
    report.enh_clean = score_condition(enh_map, trials_clean, cfg.dcf, threads);
    report.raw_noisy = score_condition(raw_map, trials_noisy, cfg.dcf, threads);
    report.enh_noisy = score_condition(enh_map, trials_noisy, cfg.dcf, threads);

    size_t improved = 0, total = 0;
    {
        size_t flat = 0;
        for (size_t i = 0; i < holdout.size(); ++i) {
            for (size_t k = 0; k < holdout[i]->noisy.size(); ++k, ++flat) {
                const double before = cosine_score(noisy_raw[flat], clean_raw[i]);
                const double after = cosine_score(noisy_enh[flat], clean_raw[i]);
                improved += after > before ? 1 : 0;
                ++total;
            }
        }
    }
    report.improved_fraction = static_cast<double>(improved) / static_cast<double>(total);

    if (!cfg.out_dir.empty()) {
        fs::create_directories(cfg.out_dir);
        write_corpus_dir(corpus, (fs::path(cfg.out_dir) / "corpus").string());
        save_checkpoint((fs::path(cfg.out_dir) / "model.ckpt").string(), trained.model,
                        schedule);
        write_history_file((fs::path(cfg.out_dir) / "history.tsv").string(), trained.history);
        write_trial_file((fs::path(cfg.out_dir) / "trials_clean.txt").string(), trials_clean);
        write_trial_file((fs::path(cfg.out_dir) / "trials_noisy.txt").string(), trials_noisy);

        std::vector<std::string> ids;
        std::vector<std::vector<float>> embs;
        for (size_t i = 0; i < holdout.size(); ++i) {
            ids.push_back(holdout[i]->group_id);
            embs.push_back(clean_enh[i]);
        }
        {
            size_t flat = 0;
            for (size_t i = 0; i < holdout.size(); ++i) {
                for (size_t k = 0; k < holdout[i]->noisy.size(); ++k, ++flat) {
                    ids.push_back(variant_id(holdout[i]->group_id, static_cast<int>(k)));
                    embs.push_back(noisy_enh[flat]);
                }
            }
        }
        write_embedding_file((fs::path(cfg.out_dir) / "enhanced.emb").string(), ids, embs);

        std::ofstream rep((fs::path(cfg.out_dir) / "report.txt").string(), std::ios::trunc);
        if (!rep) throw DataError("pipeline: cannot write report in " + cfg.out_dir);
        rep << pipeline_report_text(report);
    }
    return report;
}

std::string pipeline_report_text(const PipelineReport& r) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "groups_train=%zu groups_holdout=%zu trials_clean=%zu trials_noisy=%zu\n",
                  r.groups_train, r.groups_holdout, r.trials_clean, r.trials_noisy);
    out += buf;
    std::snprintf(buf, sizeof(buf),
                  "epochs_run=%d first_epoch_loss=%.9g final_epoch_loss=%.9g\n", r.epochs_run,
                  r.first_epoch_loss, r.final_epoch_loss);
    out += buf;
    out += "trialset\tcondition\teer_pct\tmin_dcf\tthreshold_eer\tthreshold_dcf\n";
    append_metrics(out, "clean-clean", "raw", r.raw_clean);
    append_metrics(out, "clean-clean", "enhanced", r.enh_clean);
    append_metrics(out, "clean-noisy", "raw", r.raw_noisy);
    append_metrics(out, "clean-noisy", "enhanced", r.enh_noisy);

    const double rel_reduction =
        r.raw_noisy.eer > 0.0 ? (r.raw_noisy.eer - r.enh_noisy.eer) / r.raw_noisy.eer * 100.0
                              : 0.0;
    const double rel_clean_change =
        r.raw_clean.eer > 0.0 ? (r.enh_clean.eer - r.raw_clean.eer) / r.raw_clean.eer * 100.0
                              : (r.enh_clean.eer > 0.0 ? std::numeric_limits<double>::infinity()
                                                       : 0.0);
    std::snprintf(buf, sizeof(buf), "eer_rel_reduction_noisy_pct=%.6f\n", rel_reduction);
    out += buf;
    std::snprintf(buf, sizeof(buf), "eer_rel_change_clean_pct=%.6f\n", rel_clean_change);
    out += buf;
    std::snprintf(buf, sizeof(buf), "improved_fraction=%.6f\n", r.improved_fraction);
    out += buf;
    return out;
}

}  // namespace seed
