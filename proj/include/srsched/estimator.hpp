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

#ifndef SRSCHED_ESTIMATOR_HPP_
#define SRSCHED_ESTIMATOR_HPP_

#include <cstdint>
#include <vector>

#include "srsched/dag.hpp"

namespace srsched {

// Anchor flags over global patch ids, frame-major: global id =
// frame_index * patches_per_frame + patch_index. Stored one byte per patch
// for fast random access; the packed wire form lives in the scheduler.
class AnchorSet {
 public:
  AnchorSet() = default;
  explicit AnchorSet(std::int64_t num_patches)
      : bits_(static_cast<std::size_t>(num_patches), 0) {}

  std::int64_t size() const { return static_cast<std::int64_t>(bits_.size()); }
  bool test(std::int64_t i) const {
    return bits_[static_cast<std::size_t>(i)] != 0;
  }
  void set(std::int64_t i, bool v = true) {
    bits_[static_cast<std::size_t>(i)] = v ? 1 : 0;
  }
  std::int64_t count() const {
    std::int64_t n = 0;
    for (const std::uint8_t b : bits_) n += b;
    return n;
  }
  const std::uint8_t* data() const { return bits_.data(); }

  bool operator==(const AnchorSet&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// Estimated squared SR error per patch under a given anchor set. Anchors are
// exactly 0; everything is finite and nonnegative for a valid DAG.
struct ErrorEstimate {
  std::vector<std::vector<double>> frame_errors;
  double total = 0.0;
};

// Reference implementation. Frames in decoding order; each non-anchor
// patch's error starts at its TC and accumulates weight * source error over
// edge groups in ascending reference order, columns ascending within each
// CSR row. Anchor patches are pinned to 0.
ErrorEstimate estimate_sequential(const ErrorDag& d, const AnchorSet& a);

// Batched implementation: one propagation pass evaluates all anchor sets of
// the batch, with per-frame error matrices (patches x batch) so rows stream
// through SIMD lanes. Per element it performs exactly the op sequence of
// estimate_sequential, so results are bit-identical, independent of batch
// chunking and of `threads` (workers split the batch into disjoint column
// ranges).
std::vector<ErrorEstimate> estimate_batched(const ErrorDag& d,
                                            const std::vector<AnchorSet>& batch,
                                            int threads = 1);

// Scheduling fast path: the same batched propagation, returning only each
// set's total. Totals are accumulated frame-major, patches ascending — the
// exact order estimate_sequential uses — so entry b equals
// estimate_sequential(d, batch[b]).total bit for bit.
std::vector<double> estimate_batched_totals(const ErrorDag& d,
                                            const std::vector<AnchorSet>& batch,
                                            int threads = 1);

// Greedy inner loop: every evaluated set is `base` plus one extra anchor.
// Entry i equals estimate_sequential(d, base with candidates[i] added).total
// bit for bit, at any thread count. Exploits the shared base: rows the base
// anchors are zeroed once across all columns, each candidate zeroes only its
// own cell, and only frames still reachable as references stay live, so the
// working set is a small ring instead of per-candidate anchor sets plus a
// full per-frame error history.
std::vector<double> estimate_candidate_totals(
    const ErrorDag& d, const AnchorSet& base,
    const std::vector<std::int64_t>& candidates, int threads = 1);

// Larger is better: the negated total estimated error.
inline double total_quality(const ErrorEstimate& e) { return -e.total; }

}  // namespace srsched

#endif  // SRSCHED_ESTIMATOR_HPP_
