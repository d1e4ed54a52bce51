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

#include <cstddef>
#include <functional>

namespace seed {

// 0 means "use hardware concurrency"; anything else is clamped to >= 1.
int resolve_thread_count(int requested);

// Splits [0, n) into at most `threads` contiguous chunks and runs
// fn(begin, end, chunk_index) for each, on worker threads. Chunk indices are
// assigned in range order, so a caller that merges per-chunk results by chunk
// index gets a reproducible reduction for a fixed thread count.
void parallel_for_chunks(size_t n, int threads,
                         const std::function<void(size_t, size_t, int)>& fn);

}  // namespace seed
