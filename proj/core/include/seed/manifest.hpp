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
#include <utility>
#include <vector>

// Every CLI run emits one manifest: the resolved configuration, content
// digests of the inputs, and the wall-clock duration. Manifests go to stderr
// so that report output on stdout stays byte-identical across runs.

namespace seed {

struct RunManifest {
    std::string subcommand;
    std::vector<std::pair<std::string, std::string>> config;  // insertion-ordered
    std::vector<std::pair<std::string, uint64_t>> input_digests;
    double duration_seconds = 0.0;

    void set(const std::string& key, const std::string& value) { config.emplace_back(key, value); }
    void set(const std::string& key, double value);
    void set(const std::string& key, int value) { config.emplace_back(key, std::to_string(value)); }
    void set(const std::string& key, uint64_t value) {
        config.emplace_back(key, std::to_string(value));
    }
    void set(const std::string& key, bool value) {
        config.emplace_back(key, value ? "true" : "false");
    }
    void add_input(const std::string& path);  // digests the file content
};

// FNV-1a over the raw bytes.
uint64_t fnv1a64(const void* data, size_t n);
uint64_t digest_file(const std::string& path);

std::string manifest_text(const RunManifest& m);
void emit_manifest(const RunManifest& m);  // writes manifest_text to stderr

}  // namespace seed
