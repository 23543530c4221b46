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

#ifndef SRSCHED_TRACE_HPP_
#define SRSCHED_TRACE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "srsched/pixels.hpp"

namespace srsched {

// Fixed patch tiling of an LR frame. Row/column counts are
// max(1, floor(frame_dim / patch_dim)); the last row and column absorb the
// remainder (854 wide with 170-wide patches gives 5 columns, the last one
// 174 wide), so every pixel belongs to exactly one patch.
struct PatchGrid {
  int frame_w = 0;
  int frame_h = 0;
  int patch_w = 170;
  int patch_h = 160;

  int num_cols() const {
    const int n = frame_w / patch_w;
    return n < 1 ? 1 : n;
  }
  int num_rows() const {
    const int n = frame_h / patch_h;
    return n < 1 ? 1 : n;
  }
  int num_patches() const { return num_rows() * num_cols(); }

  // Patch ids are row-major: id = row * num_cols() + col.
  int patch_index(int row, int col) const { return row * num_cols() + col; }

  // Patch column containing pixel x (x must be inside the frame).
  int col_at(int x) const {
    const int c = x / patch_w;
    const int nc = num_cols();
    return c >= nc ? nc - 1 : c;
  }
  int row_at(int y) const {
    const int r = y / patch_h;
    const int nr = num_rows();
    return r >= nr ? nr - 1 : r;
  }

  Rect patch_rect(int row, int col) const;
  Rect patch_rect(int id) const {
    return patch_rect(id / num_cols(), id % num_cols());
  }

  bool operator==(const PatchGrid&) const = default;
};

// Throws std::invalid_argument unless dimensions are positive and each patch
// dimension is at most the frame dimension it tiles.
void validate_grid(const PatchGrid& g);

enum class BlockMode : std::uint8_t { kIntra = 0, kInter = 1 };

// One coded block. Intra payload holds decoded LR pixels; inter payload
// holds the residual against the motion-compensated reference region.
struct BlockRecord {
  Rect rect;
  BlockMode mode = BlockMode::kIntra;
  int ref_slot = -1;  // index into the frame's ref_frames; inter only
  int dx = 0;         // source pixel = current pixel + (dx, dy); inter only
  int dy = 0;
  Plane payload;
};

struct FrameRecord {
  int frame_index = 0;
  bool is_keyframe = false;
  std::vector<int> ref_frames;  // earlier frame indices, most recent first
  std::vector<BlockRecord> blocks;
};

// Everything a reuse-aware SR pipeline needs to know about a coded LR
// stream: block tiling, modes, references, motion, residuals, plus the
// patch geometry and the SR scale factor.
struct Trace {
  PatchGrid grid;
  int scale = 4;
  std::vector<FrameRecord> frames;
};

// Motion-compensated source rect: displace by (dx, dy), then clamp the whole
// rect into the frame so the source always has the block's dimensions.
Rect clamped_source(const Rect& rect, int dx, int dy, int frame_w,
                    int frame_h);

// Full structural check: grid validity, contiguous frame indices, acyclic
// in-range references (at most 3, distinct), exact block tiling, payload
// dimensions, keyframe purity. Throws ValidationError naming the offending
// frame and block.
void validate_trace(const Trace& t);

// Container format: magic "SRTRACE\n", version byte, u64 LE JSON header
// length, JSON header (geometry, frame and block table with payload
// offsets), then all payloads as little-endian doubles. Round trips are
// lossless, payload bits included.
void save_trace(const Trace& t, const std::string& path);
Trace load_trace(const std::string& path);

// Bitwise equality, payload planes included.
bool traces_bit_equal(const Trace& a, const Trace& b);

// Pixels an inter sub-block draws from one reference patch.
struct RefContribution {
  int ref_patch = -1;
  std::int64_t pixels = 0;

  bool operator==(const RefContribution&) const = default;
};

// A block clipped to a single patch. For inter sub-blocks, `source` is the
// sub-block's share of the block's clamped source rect and `refs` lists the
// reference patches it overlaps; the pixel counts sum to the sub-block area.
struct SubBlock {
  int block_id = 0;
  int patch_id = 0;
  Rect rect;
  BlockMode mode = BlockMode::kIntra;
  int ref_frame = -1;  // absolute frame index; -1 for intra
  Rect source;
  std::vector<RefContribution> refs;
};

// Splits every block at patch boundaries. Deterministic order: frame, block,
// patch row, patch col; reference contributions ascending by ref patch id.
std::vector<std::vector<SubBlock>> split_blocks(const Trace& t);

}  // namespace srsched

#endif  // SRSCHED_TRACE_HPP_
