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

#include "seed/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace seed {

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for_chunks(size_t n, int threads,
                         const std::function<void(size_t, size_t, int)>& fn) {
    if (n == 0) return;
    const int workers = std::min<size_t>(std::max(threads, 1), n);
    if (workers == 1) {
        fn(0, n, 0);
        return;
    }
    const size_t base = n / workers;
    const size_t extra = n % workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    size_t begin = 0;
    for (int c = 0; c < workers; ++c) {
        const size_t len = base + (static_cast<size_t>(c) < extra ? 1 : 0);
        const size_t end = begin + len;
        pool.emplace_back([&fn, begin, end, c] { fn(begin, end, c); });
        begin = end;
    }
    for (auto& t : pool) t.join();
}

}  // namespace seed
