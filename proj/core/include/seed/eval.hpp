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

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

// Speaker-verification scoring: cosine similarity over trial lists, EER, and
// normalized minDCF. Higher score = more likely same speaker, throughout.

namespace seed {

struct Trial {
    bool target = false;
    std::string id_a;
    std::string id_b;
    size_t line = 0;  // source line in the trial file, 0 when built in memory
};

struct TrialList {
    std::vector<Trial> trials;
};

struct ScoreSet {
    std::vector<double> scores;
    std::vector<uint8_t> labels;  // 1 target, 0 nontarget, aligned with scores
};

struct DcfParams {
    double c_miss = 1.0;
    double c_fa = 1.0;
    double p_target = 0.05;
};

struct EerResult {
    double eer = 0.0;
    double threshold = 0.0;
};

struct DcfResult {
    double min_dcf = 0.0;
    double threshold = 0.0;
};

double cosine_score(std::span<const float> a, std::span<const float> b);

// Threshold sweep over the sorted unique scores plus a virtual reject-all
// threshold. FAR(th) = fraction of nontarget scores >= th, FRR(th) = fraction
// of target scores < th. EER is reported as (FAR+FRR)/2 at the threshold
// minimizing |FAR-FRR|, ties broken toward the lower threshold.
EerResult compute_eer(const ScoreSet& s);

// DCF(th) = c_miss*p_target*FRR(th) + c_fa*(1-p_target)*FAR(th) minimized over
// the same sweep, normalized by min(c_miss*p_target, c_fa*(1-p_target)).
DcfResult compute_min_dcf(const ScoreSet& s, const DcfParams& p);

using EmbMap = std::unordered_map<std::string, std::vector<float>>;

// Per-trial cosine scores in trial order; id_a resolves in emb_a, id_b in
// emb_b (pass the same map twice for single-file scoring).
ScoreSet score_trials(const EmbMap& emb_a, const EmbMap& emb_b, const TrialList& t,
                      int threads = 1);
ScoreSet score_trials(const EmbMap& emb, const TrialList& t, int threads = 1);

// One trial per line: "<label> <id_a> <id_b>", label 1 = target, 0 =
// nontarget, whitespace-separated; '#' starts a comment.
TrialList read_trial_file(const std::string& path);
void write_trial_file(const std::string& path, const TrialList& t);

}  // namespace seed
