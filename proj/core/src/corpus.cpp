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

#include "seed/corpus.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unordered_set>

#include "binio.hpp"
#include "seed/error.hpp"
#include "seed/rng.hpp"

namespace fs = std::filesystem;

namespace seed {

namespace {

constexpr char kEmbMagic[4] = {'E', 'M', 'B', '1'};
constexpr uint32_t kEmbVersion = 1;

std::vector<double> unit_sphere_point(Rng& rng, int dim) {
    std::vector<double> v;
    double norm = 0.0;
    do {
        v = rng.gaussian_vector<double>(dim);
        norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
    } while (norm < 1e-12);
    for (double& x : v) x /= norm;
    return v;
}

std::string group_name(int speaker, int utt) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "s%03d_u%03d", speaker, utt);
    return buf;
}

}  // namespace

LabeledCorpus generate_corpus(const SynthConfig& cfg) {
    if (cfg.dim < 1) throw ConfigError("synth: dim must be >= 1");
    if (cfg.n_speakers < 2) throw ConfigError("synth: n_speakers must be >= 2");
    if (cfg.utts_per_speaker < 1) throw ConfigError("synth: utts_per_speaker must be >= 1");
    if (cfg.variants < 1) throw ConfigError("synth: variants must be >= 1");
    if (cfg.within_speaker_sigma < 0 || cfg.iso_noise_sigma < 0) {
        throw ConfigError("synth: sigmas must be >= 0");
    }
    if (cfg.n_environments < 1) throw ConfigError("synth: n_environments must be >= 1");
    if (cfg.env_gain_low > cfg.env_gain_high) {
        throw ConfigError("synth: env gain range low > high");
    }
    if (!(cfg.holdout_fraction > 0.0 && cfg.holdout_fraction < 1.0)) {
        throw ConfigError("synth: holdout_fraction must be in (0, 1)");
    }

    Rng structure_rng(Rng::derive(cfg.seed, 0));
    Rng utt_rng(Rng::derive(cfg.seed, 1));
    Rng split_rng(Rng::derive(cfg.seed, 2));

    std::vector<std::vector<double>> centroids(static_cast<size_t>(cfg.n_speakers));
    for (auto& c : centroids) c = unit_sphere_point(structure_rng, cfg.dim);
    std::vector<std::vector<double>> envs(static_cast<size_t>(cfg.n_environments));
    for (auto& e : envs) e = unit_sphere_point(structure_rng, cfg.dim);

    LabeledCorpus corpus;
    corpus.variants = cfg.variants;
    for (int s = 0; s < cfg.n_speakers; ++s) {
        for (int u = 0; u < cfg.utts_per_speaker; ++u) {
            PairGroup<float> g;
            g.group_id = group_name(s, u);

            std::vector<double> clean(static_cast<size_t>(cfg.dim));
            double norm = 0.0;
            const std::vector<double> jitter = utt_rng.gaussian_vector<double>(cfg.dim);
            for (int i = 0; i < cfg.dim; ++i) {
                clean[static_cast<size_t>(i)] =
                    centroids[static_cast<size_t>(s)][static_cast<size_t>(i)] +
                    cfg.within_speaker_sigma * jitter[static_cast<size_t>(i)];
                norm += clean[static_cast<size_t>(i)] * clean[static_cast<size_t>(i)];
            }
            norm = std::sqrt(norm);
            if (norm < 1e-12) norm = 1.0;
            g.clean.resize(static_cast<size_t>(cfg.dim));
            for (int i = 0; i < cfg.dim; ++i) {
                clean[static_cast<size_t>(i)] /= norm;
                g.clean[static_cast<size_t>(i)] = static_cast<float>(clean[static_cast<size_t>(i)]);
            }

            g.noisy.resize(static_cast<size_t>(cfg.variants));
            for (int k = 0; k < cfg.variants; ++k) {
                const size_t env =
                    static_cast<size_t>(utt_rng.uniform_int(0, cfg.n_environments - 1));
                const double gain = utt_rng.uniform(cfg.env_gain_low, cfg.env_gain_high);
                const std::vector<double> iso = utt_rng.gaussian_vector<double>(cfg.dim);
                auto& noisy = g.noisy[static_cast<size_t>(k)];
                noisy.resize(static_cast<size_t>(cfg.dim));
                for (int i = 0; i < cfg.dim; ++i) {
                    noisy[static_cast<size_t>(i)] = static_cast<float>(
                        clean[static_cast<size_t>(i)] + gain * envs[env][static_cast<size_t>(i)] +
                        cfg.iso_noise_sigma * iso[static_cast<size_t>(i)]);
                }
            }
            corpus.speaker_of[g.group_id] = s;
            corpus.groups.push_back(std::move(g));
        }
    }

    const size_t total = corpus.groups.size();
    const size_t holdout_count = static_cast<size_t>(
        std::llround(static_cast<double>(total) * cfg.holdout_fraction));
    std::vector<size_t> order(total);
    for (size_t i = 0; i < total; ++i) order[i] = i;
    split_rng.shuffle(order);
    for (size_t i = 0; i < total; ++i) {
        corpus.split[corpus.groups[order[i]].group_id] =
            i < holdout_count ? Split::Holdout : Split::Train;
    }
    return corpus;
}

// ---------------------------------------------------------------------------
// EMB1
// ---------------------------------------------------------------------------

EmbeddingFile read_embedding_file(const std::string& path) {
    const std::string buf = binio::load_file(path);
    binio::Reader r{buf, 0, path};

    const std::string magic = r.bytes(4, "magic");
    if (magic != std::string(kEmbMagic, 4)) {
        throw DataError(path + ": bad magic (not an EMB1 file)");
    }
    const uint32_t version = r.u32("version");
    if (version != kEmbVersion) {
        throw DataError(path + ": unsupported EMB1 version " + std::to_string(version));
    }
    const uint32_t dim = r.u32("dim");
    const uint32_t count = r.u32("count");
    if (dim == 0) throw DataError(path + ": dim must be positive");

    EmbeddingFile out;
    out.ids.reserve(count);
    out.embeddings.reserve(count);
    std::unordered_set<std::string> seen;
    for (uint32_t rec = 0; rec < count; ++rec) {
        const std::string where = "record " + std::to_string(rec);
        const uint16_t id_len = r.u16(where + " id length");
        std::string id = r.bytes(id_len, where + " id");
        if (!seen.insert(id).second) {
            throw DataError(path + ": duplicate utterance id '" + id + "' at " + where);
        }
        std::vector<float> emb(dim);
        r.need(static_cast<size_t>(dim) * 4, where + " payload");
        for (uint32_t i = 0; i < dim; ++i) emb[i] = r.f32(where);
        out.ids.push_back(std::move(id));
        out.embeddings.push_back(std::move(emb));
    }
    if (r.pos != buf.size()) {
        throw DataError(path + ": " + std::to_string(buf.size() - r.pos) +
                        " trailing bytes after " + std::to_string(count) + " records");
    }
    return out;
}

void write_embedding_file(const std::string& path, const std::vector<std::string>& ids,
                          const std::vector<std::vector<float>>& embeddings) {
    if (ids.size() != embeddings.size()) {
        throw DataError("write " + path + ": " + std::to_string(ids.size()) + " ids vs " +
                        std::to_string(embeddings.size()) + " embeddings");
    }
    if (embeddings.empty()) throw DataError("write " + path + ": no records");
    const size_t dim = embeddings.front().size();
    if (dim == 0) throw DataError("write " + path + ": zero-dim embeddings");

    std::string out;
    out.append(kEmbMagic, 4);
    binio::append_u32(out, kEmbVersion);
    binio::append_u32(out, static_cast<uint32_t>(dim));
    binio::append_u32(out, static_cast<uint32_t>(ids.size()));
    std::unordered_set<std::string> seen;
    for (size_t rec = 0; rec < ids.size(); ++rec) {
        if (embeddings[rec].size() != dim) {
            throw DataError("write " + path + ": record " + std::to_string(rec) + " has dim " +
                            std::to_string(embeddings[rec].size()) + ", expected " +
                            std::to_string(dim));
        }
        if (ids[rec].size() > 0xffff) {
            throw DataError("write " + path + ": id at record " + std::to_string(rec) +
                            " exceeds 65535 bytes");
        }
        if (!seen.insert(ids[rec]).second) {
            throw DataError("write " + path + ": duplicate utterance id '" + ids[rec] + "'");
        }
        binio::append_u16(out, static_cast<uint16_t>(ids[rec].size()));
        out.append(ids[rec]);
        for (float v : embeddings[rec]) binio::append_f32(out, v);
    }
    binio::store_file(path, out);
}

std::unordered_map<std::string, std::vector<float>> embedding_map(const EmbeddingFile& f) {
    std::unordered_map<std::string, std::vector<float>> m;
    m.reserve(f.ids.size());
    for (size_t i = 0; i < f.ids.size(); ++i) m.emplace(f.ids[i], f.embeddings[i]);
    return m;
}

// ---------------------------------------------------------------------------
// Corpus directory
// ---------------------------------------------------------------------------

void write_corpus_dir(const LabeledCorpus& corpus, const std::string& dir) {
    if (corpus.groups.empty()) throw DataError("write corpus: no groups");
    fs::create_directories(dir);

    std::vector<std::string> ids;
    std::vector<std::vector<float>> clean;
    ids.reserve(corpus.groups.size());
    clean.reserve(corpus.groups.size());
    for (const auto& g : corpus.groups) {
        ids.push_back(g.group_id);
        clean.push_back(g.clean);
    }
    write_embedding_file((fs::path(dir) / "clean.emb").string(), ids, clean);

    for (int k = 0; k < corpus.variants; ++k) {
        std::vector<std::vector<float>> noisy;
        noisy.reserve(corpus.groups.size());
        for (const auto& g : corpus.groups) {
            if (static_cast<int>(g.noisy.size()) != corpus.variants) {
                throw DataError("write corpus: group '" + g.group_id +
                                "' variant count mismatch");
            }
            noisy.push_back(g.noisy[static_cast<size_t>(k)]);
        }
        write_embedding_file(
            (fs::path(dir) / ("noisy_" + std::to_string(k) + ".emb")).string(), ids, noisy);
    }

    std::ofstream spk((fs::path(dir) / "speakers.tsv").string(), std::ios::trunc);
    std::ofstream spl((fs::path(dir) / "split.tsv").string(), std::ios::trunc);
    if (!spk || !spl) throw DataError("write corpus: cannot open label files in " + dir);
    for (const auto& g : corpus.groups) {
        spk << g.group_id << '\t' << corpus.speaker_of.at(g.group_id) << '\n';
        spl << g.group_id << '\t'
            << (corpus.split.at(g.group_id) == Split::Holdout ? "holdout" : "train") << '\n';
    }
    if (!spk || !spl) throw DataError("write corpus: label file write failed in " + dir);
}

std::vector<PairGroup<float>> read_corpus_groups(const std::string& dir, int variants) {
    const EmbeddingFile clean = read_embedding_file((fs::path(dir) / "clean.emb").string());

    int n = variants;
    if (n <= 0) {
        n = 0;
        while (fs::exists(fs::path(dir) / ("noisy_" + std::to_string(n) + ".emb"))) ++n;
        if (n == 0) throw DataError("corpus " + dir + ": no noisy_<k>.emb files found");
    }

    std::vector<PairGroup<float>> groups(clean.ids.size());
    for (size_t i = 0; i < clean.ids.size(); ++i) {
        groups[i].group_id = clean.ids[i];
        groups[i].clean = clean.embeddings[i];
        groups[i].noisy.resize(static_cast<size_t>(n));
    }
    for (int k = 0; k < n; ++k) {
        const std::string path = (fs::path(dir) / ("noisy_" + std::to_string(k) + ".emb")).string();
        const EmbeddingFile noisy = read_embedding_file(path);
        if (noisy.ids.size() != clean.ids.size()) {
            throw DataError(path + ": " + std::to_string(noisy.ids.size()) +
                            " records, clean.emb has " + std::to_string(clean.ids.size()));
        }
        for (size_t i = 0; i < noisy.ids.size(); ++i) {
            if (noisy.ids[i] != clean.ids[i]) {
                throw DataError(path + ": record " + std::to_string(i) + " id '" + noisy.ids[i] +
                                "' does not match clean.emb id '" + clean.ids[i] + "'");
            }
            if (noisy.embeddings[i].size() != clean.embeddings[i].size()) {
                throw DataError(path + ": record " + std::to_string(i) + " dim mismatch");
            }
            groups[i].noisy[static_cast<size_t>(k)] = noisy.embeddings[i];
        }
    }
    return groups;
}

LabeledCorpus read_corpus_dir(const std::string& dir, int variants) {
    LabeledCorpus corpus;
    corpus.groups = read_corpus_groups(dir, variants);
    corpus.variants = static_cast<int>(corpus.groups.front().noisy.size());

    auto parse_tsv = [&dir](const std::string& name, auto&& on_row) {
        const std::string path = (fs::path(dir) / name).string();
        std::ifstream in(path);
        if (!in) throw DataError("cannot open " + path);
        std::string line;
        size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            const size_t tab = line.find('\t');
            if (tab == std::string::npos) {
                throw DataError(path + ": line " + std::to_string(lineno) + ": missing tab");
            }
            on_row(line.substr(0, tab), line.substr(tab + 1), path, lineno);
        }
    };

    parse_tsv("speakers.tsv", [&corpus](const std::string& id, const std::string& val,
                                        const std::string& path, size_t lineno) {
        try {
            corpus.speaker_of[id] = std::stoi(val);
        } catch (const std::exception&) {
            throw DataError(path + ": line " + std::to_string(lineno) +
                            ": bad speaker index '" + val + "'");
        }
    });
    parse_tsv("split.tsv", [&corpus](const std::string& id, const std::string& val,
                                     const std::string& path, size_t lineno) {
        if (val == "train") {
            corpus.split[id] = Split::Train;
        } else if (val == "holdout") {
            corpus.split[id] = Split::Holdout;
        } else {
            throw DataError(path + ": line " + std::to_string(lineno) + ": bad split '" + val +
                            "'");
        }
    });

    for (const auto& g : corpus.groups) {
        if (corpus.speaker_of.find(g.group_id) == corpus.speaker_of.end()) {
            throw DataError(dir + ": speakers.tsv missing group '" + g.group_id + "'");
        }
        if (corpus.split.find(g.group_id) == corpus.split.end()) {
            throw DataError(dir + ": split.tsv missing group '" + g.group_id + "'");
        }
    }
    return corpus;
}

}  // namespace seed
