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

#ifndef SRSCHED_TOY_CODEC_HPP_
#define SRSCHED_TOY_CODEC_HPP_

#include <cstdint>
#include <vector>

#include "srsched/pixels.hpp"
#include "srsched/trace.hpp"

namespace srsched {

// Deterministic synthetic HR content: a smoothly textured background under
// global pan, plus densely textured rectangles moving at per-seed velocities
// (their texture rides with them), plus per-frame noise. Velocities are
// content velocities: what sits at pixel p in frame t sits at p + v in
// frame t+1. Every pixel is snapped to the 1/256 grid inside [0, 255], so
// frames survive a float32 round trip bit-exactly and block residuals of
// downscaled frames are exact in double arithmetic.
struct SynthParams {
  int width = 3416;  // HR pixels
  int height = 1920;
  int num_frames = 60;
  std::uint64_t seed = 0;
  double pan_x = -8.0;  // background content velocity, HR pixels per frame
  double pan_y = 0.0;
  int num_rects = 4;
  double noise_amp = 2.0;
};

// Frame t only; any frame is computable without generating the others.
Plane synth_frame(const SynthParams& p, int frame_index);

std::vector<Plane> synth_video(const SynthParams& p);

// Per-frame bilinear_resample with factor 1/scale.
std::vector<Plane> downscale(const std::vector<Plane>& hr_frames, int scale);

struct EncoderCfg {
  int block_size = 16;     // LR pixels
  int search_range = 8;    // motion search in ±pixels
  int max_refs = 3;        // most recently decoded frames considered, 1..3
  int gop = 60;            // keyframe every gop frames
  double intra_threshold = 12.0;  // max SAD per pixel for inter coding

  // Geometry stamped into the produced trace.
  int patch_w = 170;
  int patch_h = 160;
  int scale = 4;
};

// Block-based encoder: frame 0 and every gop-th frame is a keyframe (all
// intra, and the reference buffer resets, so nothing references across a
// keyframe). Other frames tile into block_size blocks; each block runs an
// exhaustive SAD search over up to max_refs most recent decoded frames
// within ±search_range. Inter is chosen when best SAD/pixel is at most
// intra_threshold AND the stored residual reconstructs the block bit for
// bit (doubles do not always satisfy (cur - ref) + ref == cur; such blocks
// fall back to intra so decoding stays exact unconditionally). Candidate
// scan order is deterministic: most recent reference first, then dy and dx
// each ordered 0, -1, +1, -2, +2, ... with strict-improvement updates.
Trace encode(const std::vector<Plane>& lr_frames, const EncoderCfg& cfg);

// Exact inverse of encode: decode_lr(encode(x)) == x bit for bit.
std::vector<Plane> decode_lr(const Trace& t);

}  // namespace srsched

#endif  // SRSCHED_TOY_CODEC_HPP_
