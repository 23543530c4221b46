// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SRSCHED_PARALLEL_HPP_
#define SRSCHED_PARALLEL_HPP_

#include <cstdint>
#include <functional>

namespace srsched {

// Resolves a thread-count request: n > 0 is used as given, n == 0 means
// SRSCHED_THREADS if set, else hardware_concurrency.
int resolve_threads(int requested);

// Runs fn(begin, end) over a static partition of [0, n) into at most
// `threads` contiguous chunks. Chunk boundaries depend only on (n, threads),
// never on scheduling, and chunks are disjoint, so any function that writes
// results indexed by its range produces output independent of the number of
// worker threads. Calls with threads <= 1, n <= 1, or work below a spawn
// threshold run inline on the caller's thread.
//
// `work_per_item` is a rough cost hint (arbitrary units, ~1 per multiply-add)
// used only to decide whether spawning threads is worth it.
void parallel_for(std::int64_t n, int threads,
                  const std::function<void(std::int64_t, std::int64_t)>& fn,
                  std::int64_t work_per_item = 1);

}  // namespace srsched

#endif  // SRSCHED_PARALLEL_HPP_
