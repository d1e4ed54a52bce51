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

#include "seed/training.hpp"

#include <cstdio>
#include <fstream>

namespace seed {

LossKind parse_loss_kind(const std::string& name) {
    if (name == "mse") return LossKind::Mse;
    if (name == "l2") return LossKind::L2;
    throw ConfigError("unknown loss kind '" + name + "' (expected mse or l2)");
}

std::string loss_kind_name(LossKind k) {
    return k == LossKind::Mse ? "mse" : "l2";
}

void write_history_file(const std::string& path, const std::vector<double>& history) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot open " + path + " for writing");
    for (size_t i = 0; i < history.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%zu\t%.9g\n", i + 1, history[i]);
        out << buf;
    }
    if (!out) throw DataError("write failed for " + path);
}

}  // namespace seed
