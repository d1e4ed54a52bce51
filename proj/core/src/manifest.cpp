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

#include "seed/manifest.hpp"

#include <cstdio>
#include <sstream>

#include "binio.hpp"
#include "seed/version.hpp"

namespace seed {

void RunManifest::set(const std::string& key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    config.emplace_back(key, buf);
}

void RunManifest::add_input(const std::string& path) {
    input_digests.emplace_back(path, digest_file(path));
}

uint64_t fnv1a64(const void* data, size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = 0xcbf29ce484222325ull;
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

uint64_t digest_file(const std::string& path) {
    const std::string buf = binio::load_file(path);
    return fnv1a64(buf.data(), buf.size());
}

std::string manifest_text(const RunManifest& m) {
    std::ostringstream out;
    out << "[manifest] subcommand=" << m.subcommand << '\n';
    out << "[manifest] version=" << kVersion << '\n';
    for (const auto& [key, value] : m.config) {
        out << "[manifest] config " << key << '=' << value << '\n';
    }
    for (const auto& [path, digest] : m.input_digests) {
        char hex[32];
        std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(digest));
        out << "[manifest] input " << path << " fnv64=" << hex << '\n';
    }
    char dur[64];
    std::snprintf(dur, sizeof(dur), "%.3f", m.duration_seconds);
    out << "[manifest] duration_seconds=" << dur << '\n';
    return out.str();
}

void emit_manifest(const RunManifest& m) {
    const std::string text = manifest_text(m);
    std::fwrite(text.data(), 1, text.size(), stderr);
}

}  // namespace seed
