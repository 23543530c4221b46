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

#include "srsched/toy_codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "srsched/rng.hpp"

namespace srsched {

namespace {

constexpr std::uint64_t kTagBgCoarse = 0x6267312du;
constexpr std::uint64_t kTagBgFine = 0x6267322du;
constexpr std::uint64_t kTagRectBase = 0x72656374u;
constexpr std::uint64_t kTagRectGeom = 0x67656f6du;

// Two-round mix for per-pixel noise; cheaper than hash_mix and good enough
// for additive dither.
inline double noise01(std::uint64_t seed, std::uint64_t t, std::uint64_t x,
                      std::uint64_t y) {
  std::uint64_t z = seed * 0x9e3779b97f4a7c15ull + t * 0xc2b2ae3d27d4eb4full +
                    x * 0x165667b19e3779f9ull + y * 0x27d4eb2f165667c5ull +
                    0x452821e638d01377ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

inline double lattice_corner(std::uint64_t seed, std::uint64_t tag,
                             std::int64_t cx, std::int64_t cy) {
  return hash01(seed, tag, static_cast<std::uint64_t>(cx),
                static_cast<std::uint64_t>(cy));
}

// Bilinearly interpolated value noise over an integer lattice, evaluated at
// (x0 + i, y) for i in [0, n) and combined into out[i]. Corner hashes are
// fetched once per lattice cell, so cost per pixel is a few multiply-adds.
template <bool kOverwrite>
void lattice_row(double* out, int n, double x0, double y, int cell,
                 std::uint64_t seed, std::uint64_t tag, double amp,
                 double base) {
  const double yc = y / cell;
  const std::int64_t cy = static_cast<std::int64_t>(std::floor(yc));
  const double fy = yc - static_cast<double>(cy);
  const double inv_cell = 1.0 / cell;
  int i = 0;
  while (i < n) {
    const double x = x0 + i;
    const double xc = x * inv_cell;
    const std::int64_t cx = static_cast<std::int64_t>(std::floor(xc));
    const double fx0 = xc - static_cast<double>(cx);
    int run = static_cast<int>(
        std::floor(static_cast<double>(cx + 1) * cell - x)) ;
    if (run < 1) run = 1;
    run = std::min(run, n - i);

    const double a = lattice_corner(seed, tag, cx, cy);
    const double b = lattice_corner(seed, tag, cx + 1, cy);
    const double c = lattice_corner(seed, tag, cx, cy + 1);
    const double d = lattice_corner(seed, tag, cx + 1, cy + 1);
    const double t0 = a + fy * (c - a);
    const double t1 = b + fy * (d - b);
    const double dt = t1 - t0;

    double fx = fx0;
    for (int j = 0; j < run; ++j) {
      const double v = amp * (2.0 * (t0 + fx * dt) - 1.0);
      if constexpr (kOverwrite) {
        out[i + j] = base + v;
      } else {
        out[i + j] += v;
      }
      fx += inv_cell;
    }
    i += run;
  }
}

struct MovingRect {
  int w = 0;
  int h = 0;
  int x0 = 0;
  int y0 = 0;
  int vx = 0;
  int vy = 0;
  double base = 128.0;
};

std::vector<MovingRect> derive_rects(const SynthParams& p) {
  std::vector<MovingRect> rects(static_cast<std::size_t>(p.num_rects));
  Rng rng(hash_mix(p.seed, kTagRectGeom));
  const int min_dim = std::min(p.width, p.height);
  for (int i = 0; i < p.num_rects; ++i) {
    MovingRect& r = rects[static_cast<std::size_t>(i)];
    r.w = std::max(4, static_cast<int>(
                          min_dim * (0.12 + 0.13 * rng.next_double())));
    r.h = std::max(4, static_cast<int>(
                          min_dim * (0.12 + 0.13 * rng.next_double())));
    r.x0 = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(p.width)));
    r.y0 = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(p.height)));
    if (i % 2 == 0) {
      // Velocity on the SR-scale lattice: LR-integer displacement per frame.
      r.vx = 4 * static_cast<int>(rng.next_int(-3, 3));
      r.vy = 4 * static_cast<int>(rng.next_int(-1, 1));
      if (r.vx == 0 && r.vy == 0) r.vx = 4;
    } else {
      r.vx = static_cast<int>(rng.next_int(-9, 9));
      r.vy = static_cast<int>(rng.next_int(-5, 5));
      if (r.vx == 0 && r.vy == 0) r.vx = 5;
    }
    r.base = 90.0 + 80.0 * rng.next_double();
  }
  return rects;
}

// Wraps v into [-extent, domain) with period domain + extent, so a rect
// sliding off one side re-enters from the other.
int wrap_origin(std::int64_t v, int extent, int domain) {
  const std::int64_t period = domain + extent;
  std::int64_t m = (v + extent) % period;
  if (m < 0) m += period;
  return static_cast<int>(m - extent);
}

void check_params(const SynthParams& p) {
  if (p.width < 1 || p.height < 1) {
    throw std::invalid_argument("synth: dimensions must be positive");
  }
  if (p.num_frames < 1) {
    throw std::invalid_argument("synth: num_frames must be >= 1");
  }
  if (p.num_rects < 0) {
    throw std::invalid_argument("synth: num_rects must be >= 0");
  }
  if (p.noise_amp < 0.0) {
    throw std::invalid_argument("synth: noise_amp must be >= 0");
  }
}

}  // namespace

Plane synth_frame(const SynthParams& p, int frame_index) {
  check_params(p);
  if (frame_index < 0 || frame_index >= p.num_frames) {
    throw std::invalid_argument("synth: frame index out of range");
  }
  const double t = static_cast<double>(frame_index);
  Plane out(p.width, p.height);

  // Background sampled along the pan path: pixel (x, y) shows background
  // coordinate (x - pan_x * t, y - pan_y * t).
  const double bx0 = -p.pan_x * t;
  for (int y = 0; y < p.height; ++y) {
    double* row = out.row(y);
    std::fill(row, row + p.width, 120.0);
    const double by = y - p.pan_y * t;
    lattice_row<false>(row, p.width, bx0, by, 96, p.seed, kTagBgCoarse, 50.0,
                       0.0);
    lattice_row<false>(row, p.width, bx0, by, 24, p.seed, kTagBgFine, 10.0,
                       0.0);
  }

  const std::vector<MovingRect> rects = derive_rects(p);
  for (std::size_t ri = 0; ri < rects.size(); ++ri) {
    const MovingRect& r = rects[ri];
    const int ox = wrap_origin(
        static_cast<std::int64_t>(r.x0) + static_cast<std::int64_t>(r.vx) * frame_index,
        r.w, p.width);
    const int oy = wrap_origin(
        static_cast<std::int64_t>(r.y0) + static_cast<std::int64_t>(r.vy) * frame_index,
        r.h, p.height);
    const int xs = std::max(0, ox);
    const int xe = std::min(p.width, ox + r.w);
    const int ys = std::max(0, oy);
    const int ye = std::min(p.height, oy + r.h);
    if (xs >= xe || ys >= ye) continue;
    // Texture in rect-local coordinates so it travels with the rect.
    for (int y = ys; y < ye; ++y) {
      lattice_row<true>(out.row(y) + xs, xe - xs, xs - ox, y - oy, 3, p.seed,
                        kTagRectBase + ri, 55.0, r.base);
    }
  }

  for (int y = 0; y < p.height; ++y) {
    double* row = out.row(y);
    for (int x = 0; x < p.width; ++x) {
      double v = row[x];
      if (p.noise_amp != 0.0) {
        v += p.noise_amp *
             (2.0 * noise01(p.seed, static_cast<std::uint64_t>(frame_index),
                            static_cast<std::uint64_t>(x),
                            static_cast<std::uint64_t>(y)) -
              1.0);
      }
      v = std::clamp(v, 0.0, 255.0);
      // Snap to the 1/256 grid; values then carry at most 16 mantissa bits.
      row[x] = std::floor(v * 256.0 + 0.5) * (1.0 / 256.0);
    }
  }
  return out;
}

std::vector<Plane> synth_video(const SynthParams& p) {
  check_params(p);
  std::vector<Plane> frames;
  frames.reserve(static_cast<std::size_t>(p.num_frames));
  for (int f = 0; f < p.num_frames; ++f) {
    frames.push_back(synth_frame(p, f));
  }
  return frames;
}

std::vector<Plane> downscale(const std::vector<Plane>& hr_frames, int scale) {
  if (scale < 1) throw std::invalid_argument("downscale: scale must be >= 1");
  std::vector<Plane> out;
  out.reserve(hr_frames.size());
  const double factor = 1.0 / scale;
  for (const Plane& f : hr_frames) {
    out.push_back(bilinear_resample(f, factor));
  }
  return out;
}

namespace {

// Offsets ordered 0, -1, +1, -2, +2, ...: with strict-improvement updates
// this realizes the documented tie-break (closest offset wins, negative
// before positive at equal distance).
std::vector<int> spiral_offsets(int range) {
  std::vector<int> offs;
  offs.reserve(static_cast<std::size_t>(2 * range + 1));
  offs.push_back(0);
  for (int k = 1; k <= range; ++k) {
    offs.push_back(-k);
    offs.push_back(k);
  }
  return offs;
}

// Sum of |cur - ref| over the block; bails out once the partial sum reaches
// `limit` (a candidate that cannot win never needs an exact total).
double sad_block(const Plane& cur, const Rect& rect, const Plane& ref,
                 const Rect& src, double limit) {
  double acc = 0.0;
  for (int y = 0; y < rect.h; ++y) {
    const double* a = cur.row(rect.y + y) + rect.x;
    const double* b = ref.row(src.y + y) + src.x;
    for (int x = 0; x < rect.w; ++x) {
      acc += std::abs(a[x] - b[x]);
    }
    if (acc >= limit) return acc;
  }
  return acc;
}

bool reconstructs_exactly(const Plane& cur, const Rect& rect, const Plane& ref,
                          const Rect& src, const Plane& residual) {
  for (int y = 0; y < rect.h; ++y) {
    const double* c = cur.row(rect.y + y) + rect.x;
    const double* r = ref.row(src.y + y) + src.x;
    const double* d = residual.row(y);
    for (int x = 0; x < rect.w; ++x) {
      if (std::bit_cast<std::uint64_t>(r[x] + d[x]) !=
          std::bit_cast<std::uint64_t>(c[x])) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

Trace encode(const std::vector<Plane>& lr_frames, const EncoderCfg& cfg) {
  if (lr_frames.empty()) {
    throw std::invalid_argument("encode: empty input");
  }
  if (cfg.block_size < 1) {
    throw std::invalid_argument("encode: block_size must be >= 1");
  }
  if (cfg.search_range < 0) {
    throw std::invalid_argument("encode: search_range must be >= 0");
  }
  if (cfg.max_refs < 1 || cfg.max_refs > 3) {
    throw std::invalid_argument("encode: max_refs must be in [1, 3]");
  }
  if (cfg.gop < 1) {
    throw std::invalid_argument("encode: gop must be >= 1");
  }
  if (cfg.scale < 1) {
    throw std::invalid_argument("encode: scale must be >= 1");
  }
  const int W = lr_frames[0].width;
  const int H = lr_frames[0].height;
  for (const Plane& f : lr_frames) {
    if (f.width != W || f.height != H) {
      throw std::invalid_argument("encode: frame dimensions differ");
    }
  }

  Trace t;
  t.grid = PatchGrid{W, H, cfg.patch_w, cfg.patch_h};
  validate_grid(t.grid);
  t.scale = cfg.scale;

  const std::vector<int> offsets = spiral_offsets(cfg.search_range);
  // Lossless residuals make decoded frames equal the inputs, so the decoded
  // frame buffer can alias them. Most recent first; reset at keyframes.
  std::vector<int> buffer;

  for (std::size_t fi = 0; fi < lr_frames.size(); ++fi) {
    const Plane& cur = lr_frames[fi];
    const int findex = static_cast<int>(fi);
    const bool key = findex % cfg.gop == 0;
    if (key) buffer.clear();

    FrameRecord fr;
    fr.frame_index = findex;
    fr.is_keyframe = key;
    fr.ref_frames = buffer;

    for (int y = 0; y < H; y += cfg.block_size) {
      const int bh = std::min(cfg.block_size, H - y);
      for (int x = 0; x < W; x += cfg.block_size) {
        const int bw = std::min(cfg.block_size, W - x);
        const Rect rect{x, y, bw, bh};

        BlockRecord blk;
        blk.rect = rect;
        blk.mode = BlockMode::kIntra;

        if (!key && !fr.ref_frames.empty()) {
          double best_sad = std::numeric_limits<double>::infinity();
          int best_slot = -1;
          int best_dx = 0;
          int best_dy = 0;
          Rect best_src;
          for (std::size_t s = 0;
               s < fr.ref_frames.size() && best_sad > 0.0; ++s) {
            const Plane& ref = lr_frames[static_cast<std::size_t>(
                fr.ref_frames[s])];
            for (const int dy : offsets) {
              for (const int dx : offsets) {
                const Rect src = clamped_source(rect, dx, dy, W, H);
                const double sad = sad_block(cur, rect, ref, src, best_sad);
                if (sad < best_sad) {
                  best_sad = sad;
                  best_slot = static_cast<int>(s);
                  best_dx = dx;
                  best_dy = dy;
                  best_src = src;
                }
                if (best_sad == 0.0) break;
              }
              if (best_sad == 0.0) break;
            }
          }
          if (best_slot >= 0 &&
              best_sad <= cfg.intra_threshold * static_cast<double>(rect.area())) {
            const Plane& ref = lr_frames[static_cast<std::size_t>(
                fr.ref_frames[static_cast<std::size_t>(best_slot)])];
            Plane residual(bw, bh);
            for (int ry = 0; ry < bh; ++ry) {
              const double* c = cur.row(rect.y + ry) + rect.x;
              const double* r = ref.row(best_src.y + ry) + best_src.x;
              double* d = residual.row(ry);
              for (int rx = 0; rx < bw; ++rx) {
                d[rx] = c[rx] - r[rx];
              }
            }
            if (reconstructs_exactly(cur, rect, ref, best_src, residual)) {
              blk.mode = BlockMode::kInter;
              blk.ref_slot = best_slot;
              blk.dx = best_dx;
              blk.dy = best_dy;
              blk.payload = std::move(residual);
            }
          }
        }

        if (blk.mode == BlockMode::kIntra) {
          blk.payload = crop(cur, rect);
        }
        fr.blocks.push_back(std::move(blk));
      }
    }

    t.frames.push_back(std::move(fr));
    buffer.insert(buffer.begin(), findex);
    if (static_cast<int>(buffer.size()) > cfg.max_refs) {
      buffer.resize(static_cast<std::size_t>(cfg.max_refs));
    }
  }
  return t;
}

std::vector<Plane> decode_lr(const Trace& t) {
  validate_trace(t);
  const int W = t.grid.frame_w;
  const int H = t.grid.frame_h;
  std::vector<Plane> out;
  out.reserve(t.frames.size());
  for (const FrameRecord& fr : t.frames) {
    Plane frame(W, H);
    for (const BlockRecord& b : fr.blocks) {
      if (b.mode == BlockMode::kIntra) {
        paste(frame, b.payload, b.rect.x, b.rect.y);
      } else {
        const Plane& ref = out[static_cast<std::size_t>(
            fr.ref_frames[static_cast<std::size_t>(b.ref_slot)])];
        const Rect src = clamped_source(b.rect, b.dx, b.dy, W, H);
        for (int y = 0; y < b.rect.h; ++y) {
          const double* r = ref.row(src.y + y) + src.x;
          const double* d = b.payload.row(y);
          double* dst = frame.row(b.rect.y + y) + b.rect.x;
          for (int x = 0; x < b.rect.w; ++x) {
            dst[x] = r[x] + d[x];
          }
        }
      }
    }
    out.push_back(std::move(frame));
  }
  return out;
}

}  // namespace srsched
