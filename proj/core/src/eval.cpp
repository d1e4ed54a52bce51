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

#include "seed/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "seed/error.hpp"
#include "seed/parallel.hpp"

namespace seed {

namespace {

// FAR/FRR for every candidate threshold. Candidates are the sorted unique
// scores in ascending order, plus +inf (reject everything); at a candidate
// equal to some score, that score still counts as accepted.
struct SweepPoint {
    double threshold;
    double far;
    double frr;
};

std::vector<SweepPoint> threshold_sweep(const ScoreSet& s) {
    if (s.scores.size() != s.labels.size()) {
        throw DataError("score set: scores and labels differ in length");
    }
    std::vector<double> targets, nontargets;
    for (size_t i = 0; i < s.scores.size(); ++i) {
        if (!std::isfinite(s.scores[i])) {
            throw DataError("score set: non-finite score at index " + std::to_string(i));
        }
        (s.labels[i] != 0 ? targets : nontargets).push_back(s.scores[i]);
    }
    if (targets.empty()) throw DataError("score set: no target trials");
    if (nontargets.empty()) throw DataError("score set: no nontarget trials");
    std::sort(targets.begin(), targets.end());
    std::sort(nontargets.begin(), nontargets.end());

    std::vector<double> unique = s.scores;
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

    std::vector<SweepPoint> sweep;
    sweep.reserve(unique.size() + 1);
    const double n_tgt = static_cast<double>(targets.size());
    const double n_non = static_cast<double>(nontargets.size());
    for (double th : unique) {
        const auto non_below = std::lower_bound(nontargets.begin(), nontargets.end(), th) -
                               nontargets.begin();
        const auto tgt_below = std::lower_bound(targets.begin(), targets.end(), th) -
                               targets.begin();
        sweep.push_back({th, static_cast<double>(nontargets.size() - non_below) / n_non,
                         static_cast<double>(tgt_below) / n_tgt});
    }
    sweep.push_back({std::numeric_limits<double>::infinity(), 0.0, 1.0});
    return sweep;
}

}  // namespace

double cosine_score(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) {
        throw DataError("cosine: dim mismatch (" + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + ")");
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw DataError("cosine: zero-norm embedding");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

EerResult compute_eer(const ScoreSet& s) {
    const std::vector<SweepPoint> sweep = threshold_sweep(s);
    EerResult best;
    double best_gap = std::numeric_limits<double>::infinity();
    for (const SweepPoint& p : sweep) {
        const double gap = std::fabs(p.far - p.frr);
        if (gap < best_gap) {
            best_gap = gap;
            best.eer = (p.far + p.frr) / 2.0;
            best.threshold = p.threshold;
        }
    }
    return best;
}

DcfResult compute_min_dcf(const ScoreSet& s, const DcfParams& p) {
    if (p.c_miss <= 0.0 || p.c_fa <= 0.0) throw ConfigError("minDCF: costs must be > 0");
    if (!(p.p_target > 0.0 && p.p_target < 1.0)) {
        throw ConfigError("minDCF: p_target must be in (0, 1)");
    }
    const double norm = std::min(p.c_miss * p.p_target, p.c_fa * (1.0 - p.p_target));
    const std::vector<SweepPoint> sweep = threshold_sweep(s);
    DcfResult best;
    double best_raw = std::numeric_limits<double>::infinity();
    for (const SweepPoint& pt : sweep) {
        const double dcf = p.c_miss * p.p_target * pt.frr + p.c_fa * (1.0 - p.p_target) * pt.far;
        if (dcf < best_raw) {
            best_raw = dcf;
            best.threshold = pt.threshold;
        }
    }
    best.min_dcf = best_raw / norm;
    return best;
}

ScoreSet score_trials(const EmbMap& emb_a, const EmbMap& emb_b, const TrialList& t,
                      int threads) {
    ScoreSet out;
    out.scores.resize(t.trials.size());
    out.labels.resize(t.trials.size());

    auto locate = [](const EmbMap& m, const std::string& id, const Trial& trial)
        -> const std::vector<float>& {
        const auto it = m.find(id);
        if (it == m.end()) {
            std::string msg = "unknown utterance id '" + id + "'";
            if (trial.line > 0) msg += " (trial file line " + std::to_string(trial.line) + ")";
            throw DataError(msg);
        }
        return it->second;
    };

    auto run = [&](size_t lo, size_t hi, int) {
        for (size_t i = lo; i < hi; ++i) {
            const Trial& trial = t.trials[i];
            const auto& a = locate(emb_a, trial.id_a, trial);
            const auto& b = locate(emb_b, trial.id_b, trial);
            try {
                out.scores[i] = cosine_score(a, b);
            } catch (const DataError& e) {
                std::string msg = std::string(e.what()) + " in trial ('" + trial.id_a + "', '" +
                                  trial.id_b + "')";
                if (trial.line > 0) msg += " at trial file line " + std::to_string(trial.line);
                throw DataError(msg);
            }
            out.labels[i] = trial.target ? 1 : 0;
        }
    };

    const int n_threads = resolve_thread_count(threads);
    if (n_threads <= 1 || t.trials.size() < 2) {
        run(0, t.trials.size(), 0);
    } else {
        parallel_for_chunks(t.trials.size(), n_threads, run);
    }
    return out;
}

ScoreSet score_trials(const EmbMap& emb, const TrialList& t, int threads) {
    return score_trials(emb, emb, t, threads);
}

TrialList read_trial_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    TrialList out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string label, id_a, id_b, extra;
        if (!(ss >> label)) continue;  // blank or comment-only line
        if (!(ss >> id_a >> id_b)) {
            throw DataError(path + ": line " + std::to_string(lineno) +
                            ": expected '<label> <id_a> <id_b>'");
        }
        if (ss >> extra) {
            throw DataError(path + ": line " + std::to_string(lineno) + ": trailing field '" +
                            extra + "'");
        }
        if (label != "0" && label != "1") {
            throw DataError(path + ": line " + std::to_string(lineno) + ": label must be 0 or 1, got '" +
                            label + "'");
        }
        out.trials.push_back({label == "1", id_a, id_b, lineno});
    }
    if (out.trials.empty()) throw DataError(path + ": no trials");
    return out;
}

void write_trial_file(const std::string& path, const TrialList& t) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open " + path + " for writing");
    for (const Trial& trial : t.trials) {
        out << (trial.target ? '1' : '0') << ' ' << trial.id_a << ' ' << trial.id_b << '\n';
    }
    if (!out) throw DataError("write failed for " + path);
}

}  // namespace seed
