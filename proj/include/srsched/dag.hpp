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

#ifndef SRSCHED_DAG_HPP_
#define SRSCHED_DAG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "srsched/complexity.hpp"
#include "srsched/trace.hpp"

namespace srsched {

// Sparse reuse-fraction matrix between two frames' patch sets: entry
// (dependent patch, reference patch) is the fraction of the reference patch
// the dependent patch draws from. CSR with column indices strictly
// ascending within each row; zero entries are omitted. The fixed column
// order within rows is load-bearing: both error estimators accumulate in
// this order, which is what makes them bit-exact equals.
struct WeightMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::int64_t> row_ptr;  // length rows + 1
  std::vector<std::int32_t> col_idx;  // length nnz, ascending within a row
  std::vector<double> weight;         // length nnz, all > 0

  std::int64_t nnz() const {
    return row_ptr.empty() ? 0 : row_ptr.back();
  }
};

struct DagEdgeGroup {
  int ref_frame_index = -1;
  WeightMatrix weights;
};

struct DagFrame {
  int frame_index = 0;
  bool is_keyframe = false;
  TcVector tc;
  // Ascending by ref_frame_index; at most 3 groups; refs strictly earlier.
  std::vector<DagEdgeGroup> in_edges;
};

// Patch-level error-flow graph of a coded stream: per frame, a static
// texture-complexity vector plus weighted edges to the patches it
// motion-compensates from. Acyclic by construction (edges point to strictly
// earlier frames).
struct ErrorDag {
  PatchGrid grid;
  std::vector<DagFrame> frames;

  int num_patches_per_frame() const { return grid.num_patches(); }
  std::int64_t total_patches() const {
    return static_cast<std::int64_t>(frames.size()) * grid.num_patches();
  }
};

// Builds the DAG from a trace and its per-frame TC vectors. Each inter
// sub-block reference pair (ref_patch, pixels) contributes
// pixels / |ref_patch| to Weight[dep_patch, ref_patch] in that
// (frame, ref_frame) group. Contributions are merged as exact integer pixel
// counts and divided once, so a fully referenced patch yields weight
// exactly 1.0. TC vectors must match the trace frame-for-frame; mismatch
// throws std::invalid_argument.
ErrorDag build_dag(const Trace& t, const std::vector<TcVector>& tc);

struct DagCheck {
  std::string name;
  bool pass = true;
  std::string detail;  // first offending frame/patch/edge when failed
};

struct DagReport {
  std::vector<DagCheck> checks;
  bool all_pass() const {
    for (const DagCheck& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
};

// Structural audit: grid validity, contiguous frame indices, acyclic and
// distinct references (at most 3 groups, ascending), CSR well-formedness,
// positive finite weights, nonnegative finite TC of the right length, and
// the reuse bound: for every patch P, the source pixels its in-edges claim,
// summed as weight x reference patch area over all of the frame's edge
// groups, stay at or below |P| (1e-9 relative slack). Reports instead of
// throwing.
DagReport validate_dag(const ErrorDag& d);

// How much later frames lean on each frame / block: referencing pixels
// (from motion-compensated source rects of later inter blocks) divided by
// the referenced area. Computed per frame and per block, block values
// grouped by the block's own coding mode.
struct DegreeReport {
  std::vector<double> frame_degree;         // per frame index
  std::vector<double> intra_block_degrees;  // one entry per intra block
  std::vector<double> inter_block_degrees;  // one entry per inter block
};

DegreeReport degree_of_reference(const Trace& t);

// Common-language effect size: probability that a random sample from xs
// exceeds a random sample from ys, ties counting half. Both inputs must be
// non-empty.
double cles(const std::vector<double>& xs, const std::vector<double>& ys);

// Container: magic "SRERRDAG", version byte, u64 LE JSON header length,
// JSON header (grid, frames, edge-group table with byte offsets), then a
// binary payload holding per-frame TC (f64), and per-group CSR arrays
// (row_ptr i64, col_idx i32, weight f64), all little-endian.
void save_dag(const ErrorDag& d, const std::string& path);
ErrorDag load_dag(const std::string& path);

// Graph-description text (DOT). Edges point in the direction error flows:
// reference patch -> dependent patch, labeled with the weight. Intended for
// small DAGs.
void dump_dot(const ErrorDag& d, const std::string& path);

// Frames [begin, end) as a standalone DAG, frame indices rebased to 0.
// Edge groups referencing frames before `begin` are dropped, so no error
// propagates across the boundary; that is exact when intervals are
// keyframe-aligned, since nothing references across a keyframe anyway.
ErrorDag extract_interval(const ErrorDag& d, int begin, int end);

}  // namespace srsched

#endif  // SRSCHED_DAG_HPP_
