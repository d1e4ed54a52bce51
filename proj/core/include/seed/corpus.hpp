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
#include <string>
#include <unordered_map>
#include <vector>

#include "seed/training.hpp"

// Synthetic environment-mismatch corpus generation and the EMB1 embedding
// file format.

namespace seed {

struct SynthConfig {
    int dim = 16;
    int n_speakers = 20;
    int utts_per_speaker = 10;
    int variants = 3;
    double within_speaker_sigma = 0.08;
    int n_environments = 8;
    double env_gain_low = 0.3;
    double env_gain_high = 0.9;
    double iso_noise_sigma = 0.05;
    uint64_t seed = 0;
    double holdout_fraction = 0.2;
};

enum class Split { Train, Holdout };

// speaker_of exists for trial construction only; training code paths receive
// the bare group vector and never see it.
struct LabeledCorpus {
    std::vector<PairGroup<float>> groups;
    std::unordered_map<std::string, int> speaker_of;
    std::unordered_map<std::string, Split> split;
    int variants = 0;
};

// Clean utterances are unit-norm points clustered around per-speaker sphere
// centroids; noisy variants add a shared environment direction at a random
// gain plus isotropic noise, which breaks the norm the way real extractors do
// under acoustic mismatch. Deterministic given cfg.seed.
LabeledCorpus generate_corpus(const SynthConfig& cfg);

// ---------------------------------------------------------------------------
// EMB1 file format
// ---------------------------------------------------------------------------
// magic "EMB1", u32 version (=1), u32 dim, u32 count, then per record:
// u16 id byte length, UTF-8 id bytes, dim little-endian f32 values.

struct EmbeddingFile {
    std::vector<std::string> ids;
    std::vector<std::vector<float>> embeddings;
};

EmbeddingFile read_embedding_file(const std::string& path);
void write_embedding_file(const std::string& path, const std::vector<std::string>& ids,
                          const std::vector<std::vector<float>>& embeddings);

std::unordered_map<std::string, std::vector<float>> embedding_map(const EmbeddingFile& f);

// ---------------------------------------------------------------------------
// Corpus directory layout
// ---------------------------------------------------------------------------
// clean.emb, noisy_<k>.emb for k in [0, variants), speakers.tsv
// (group_id<TAB>speaker index), split.tsv (group_id<TAB>train|holdout).

void write_corpus_dir(const LabeledCorpus& corpus, const std::string& dir);

// Groups only (clean + noisy variants); the label files are never touched.
// variants <= 0 loads every consecutive noisy_<k>.emb present.
std::vector<PairGroup<float>> read_corpus_groups(const std::string& dir, int variants);

// Full labeled corpus, including speaker and split assignments.
LabeledCorpus read_corpus_dir(const std::string& dir, int variants);

}  // namespace seed
