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

#ifndef SRSCHED_SCHEDULER_HPP_
#define SRSCHED_SCHEDULER_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "srsched/dag.hpp"
#include "srsched/estimator.hpp"
#include "srsched/trace.hpp"

namespace srsched {

struct ScheduleCfg {
  // Exactly one of budget / budget_ratio must be set. Both apply per
  // scheduling interval: a count of anchors, or a fraction of the
  // interval's patches (converted by floor).
  int budget = -1;
  double budget_ratio = -1.0;

  int candidate_batch = 1024;  // anchor sets per batched-estimation call
  int interval = 0;            // frames per interval; <= 0: keyframe-aligned
  int threads = 1;
};

// Validates and converts the budget for an interval holding total_patches
// patches. Throws std::invalid_argument when unset, ambiguous, negative, or
// exceeding total_patches.
int resolve_budget(const ScheduleCfg& cfg, std::int64_t total_patches);

struct GreedyStep {
  int patch_id = -1;          // global id within the scheduled DAG
  double total_error = 0.0;   // estimated total after anchoring it
};

// The greedy pick sequence; total_error is non-increasing along steps.
struct GreedyTrajectory {
  std::vector<GreedyStep> steps;
};

// Budgeted greedy anchor selection on one DAG: each round evaluates, in
// candidate_batch chunks of one batched-estimation call, every candidate
// extension of the current set, and anchors the patch minimizing total
// estimated error (ties: smallest global patch id). The result does not
// depend on candidate_batch or threads.
std::pair<AnchorSet, GreedyTrajectory> greedy_select(const ErrorDag& d,
                                                     const ScheduleCfg& cfg);

// Baseline: anchors every keyframe patch, then spreads the leftover budget
// at equal strides over the remaining patches in frame-major order
// (stride = floor(remaining / leftover), offsets 0, stride, 2*stride, ...).
// Applied per scheduling interval. Budget below an interval's keyframe
// patch count throws std::invalid_argument.
AnchorSet baseline_key_uniform(const Trace& t, const ScheduleCfg& cfg);

enum class AblationMode {
  // Replace every frame's in-edges with weight-1 edges from the co-located
  // patch of the immediately preceding frame (frame 0: none); TC kept.
  kNoWeight,
  // Keep edges; set every TC to 1.
  kNoTc,
};

ErrorDag ablated_dag(const ErrorDag& d, AblationMode mode);

// Anchor bits packed little-endian within bytes (bit i of the set is bit
// i % 8 of byte i / 8), final byte zero-padded. Example: one 15-patch frame
// with anchors {0, 3} packs to bytes 0b00001001, 0b00000000. The set's
// length must equal num_frames * grid patches. Decode rejects wrong byte
// counts and nonzero padding with FormatError.
std::vector<std::uint8_t> profile_encode(const AnchorSet& a,
                                         const PatchGrid& grid,
                                         int num_frames);
AnchorSet profile_decode(const std::vector<std::uint8_t>& bytes,
                         const PatchGrid& grid, int num_frames);

// The downloadable decision artifact: which patches of a segment to anchor.
struct CacheProfile {
  int num_frames = 0;
  int num_patch_rows = 0;
  int num_patch_cols = 0;
  AnchorSet anchors;
};

// Container: magic "SRPF", version byte, u32 LE num_frames / patch rows /
// patch cols, then the packed bits.
void save_profile(const CacheProfile& p, const std::string& path);
CacheProfile load_profile(const std::string& path);

// Human-readable rendering (one character grid per frame) for debugging.
std::string profile_text(const CacheProfile& p);

enum class ScheduleMethod {
  kGreedy,
  kKeyUniform,
  kNoWeight,
  kNoTc,
  kPerFrame,  // anchor everything (reuse disabled)
};

// [begin, end) frame ranges; interval > 0 gives fixed-length ranges, else
// ranges split at keyframes.
std::vector<std::pair<int, int>> partition_intervals(const ErrorDag& d,
                                                     int interval);

struct ScheduleResult {
  AnchorSet anchors;
  std::vector<std::pair<int, int>> intervals;
  // One per interval for the greedy-family methods, empty otherwise.
  std::vector<GreedyTrajectory> trajectories;
};

// Whole-stream scheduling: partitions into intervals, runs `method` on each
// interval's standalone DAG, and merges the picks. Budgets apply per
// interval.
ScheduleResult schedule_dag(const ErrorDag& d, const ScheduleCfg& cfg,
                            ScheduleMethod method);

}  // namespace srsched

#endif  // SRSCHED_SCHEDULER_HPP_
