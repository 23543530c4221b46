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

#include "srsched/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace srsched {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SRSCHED_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

// Below this many cost units a thread spawn costs more than it saves.
constexpr std::int64_t kSpawnThresholdWork = 1 << 16;

}  // namespace

void parallel_for(std::int64_t n, int threads,
                  const std::function<void(std::int64_t, std::int64_t)>& fn,
                  std::int64_t work_per_item) {
  if (n <= 0) return;
  const int workers =
      static_cast<int>(std::min<std::int64_t>(std::max(threads, 1), n));
  if (workers == 1 || n * std::max<std::int64_t>(work_per_item, 1) <
                          kSpawnThresholdWork) {
    fn(0, n);
    return;
  }

  // Static partition: chunk c covers [c*q + min(c,r), ...), sizes differ by
  // at most one. Depends only on (n, workers).
  const std::int64_t q = n / workers;
  const std::int64_t r = n % workers;
  auto chunk_begin = [q, r](std::int64_t c) {
    return c * q + std::min<std::int64_t>(c, r);
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers) - 1);
  std::exception_ptr first_error;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int c = 1; c < workers; ++c) {
    pool.emplace_back([&, c] {
      try {
        fn(chunk_begin(c), chunk_begin(c + 1));
      } catch (...) {
        errors[static_cast<std::size_t>(c)] = std::current_exception();
      }
    });
  }
  try {
    fn(chunk_begin(0), chunk_begin(1));
  } catch (...) {
    errors[0] = std::current_exception();
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) {
      first_error = e;
      break;
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace srsched
