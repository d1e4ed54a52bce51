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

// Private little-endian serialization helpers shared by the binary file
// formats. Integers and IEEE floats are encoded byte-by-byte, so files are
// identical across platforms.

#include <bit>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>

#include "seed/error.hpp"

namespace seed::binio {

inline void append_u16(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

inline void append_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void append_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void append_f32(std::string& out, float v) { append_u32(out, std::bit_cast<uint32_t>(v)); }

inline void append_f64(std::string& out, double v) {
    append_u64(out, std::bit_cast<uint64_t>(v));
}

// Byte cursor over a fully loaded file, with position-bearing errors.
struct Reader {
    const std::string& buf;
    size_t pos = 0;
    const std::string& path;

    void need(size_t n, const std::string& what) const {
        if (pos + n > buf.size()) {
            throw DataError(path + ": truncated while reading " + what + " at byte " +
                            std::to_string(pos) + ": need " + std::to_string(n) +
                            " more bytes, file has " + std::to_string(buf.size() - pos));
        }
    }
    uint16_t u16(const std::string& what) {
        need(2, what);
        const auto* p = reinterpret_cast<const unsigned char*>(buf.data() + pos);
        pos += 2;
        return static_cast<uint16_t>(p[0] | (p[1] << 8));
    }
    uint32_t u32(const std::string& what) {
        need(4, what);
        const auto* p = reinterpret_cast<const unsigned char*>(buf.data() + pos);
        pos += 4;
        return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
               (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
    }
    uint64_t u64(const std::string& what) {
        need(8, what);
        uint64_t v = 0;
        const auto* p = reinterpret_cast<const unsigned char*>(buf.data() + pos);
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
        pos += 8;
        return v;
    }
    float f32(const std::string& what) { return std::bit_cast<float>(u32(what)); }
    double f64(const std::string& what) { return std::bit_cast<double>(u64(what)); }
    std::string bytes(size_t n, const std::string& what) {
        need(n, what);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
};

inline std::string load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void store_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw DataError("write failed for " + path);
}

}  // namespace seed::binio
