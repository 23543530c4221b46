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

#include "srsched/reuse_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "srsched/rng.hpp"

namespace srsched {

namespace {

// Copies a same-position region between two equally sized planes.
void copy_region(Plane& dst, const Plane& src, int x, int y, int w, int h) {
  for (int yy = 0; yy < h; ++yy) {
    std::memcpy(dst.row(y + yy) + x, src.row(y + yy) + x,
                static_cast<std::size_t>(w) * sizeof(double));
  }
}

double region_squared_error(const Plane& a, const Plane& b, int x, int y,
                            int w, int h) {
  double acc = 0.0;
  for (int yy = 0; yy < h; ++yy) {
    const double* pa = a.row(y + yy) + x;
    const double* pb = b.row(y + yy) + x;
    for (int xx = 0; xx < w; ++xx) {
      const double d = pa[xx] - pb[xx];
      acc += d * d;
    }
  }
  return acc;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&v](std::size_t a, std::size_t b) {
    return v[a] != v[b] ? v[a] < v[b] : a < b;
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double mean_rank = 0.5 * (static_cast<double>(i) +
                                    static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

SimReport simulate(const Trace& t, const AnchorSet& anchors,
                   const HrSource& hr, const SimCfg& cfg) {
  const std::vector<std::vector<SubBlock>> subs = split_blocks(t);
  const PatchGrid& g = t.grid;
  const std::int64_t np = g.num_patches();
  const int frames = static_cast<int>(t.frames.size());
  if (anchors.size() != static_cast<std::int64_t>(frames) * np) {
    throw std::invalid_argument(
        "simulate: anchor set holds " + std::to_string(anchors.size()) +
        " bits, trace wants " + std::to_string(frames * np));
  }
  if (!(cfg.anchor_noise_amp >= 0.0)) {
    throw std::invalid_argument("simulate: anchor_noise_amp must be >= 0");
  }
  const int scale = t.scale;
  const int sr_w = g.frame_w * scale;
  const int sr_h = g.frame_h * scale;

  // A reference frame stays cached until the last frame that reuses it.
  std::vector<int> last_use(static_cast<std::size_t>(frames), -1);
  for (int f = 0; f < frames; ++f) {
    for (const int ref : t.frames[f].ref_frames) {
      last_use[static_cast<std::size_t>(ref)] =
          std::max(last_use[static_cast<std::size_t>(ref)], f);
    }
  }
  std::map<int, Plane> sr_cache;

  SimReport report;
  report.frame_patch_errors.reserve(static_cast<std::size_t>(frames));
  report.frame_psnr.reserve(static_cast<std::size_t>(frames));
  double total_se = 0.0;
  std::int64_t anchor_lr_pixels = 0;

  for (int f = 0; f < frames; ++f) {
    const FrameRecord& fr = t.frames[f];
    const Plane hr_f = hr(f);
    if (hr_f.width != sr_w || hr_f.height != sr_h) {
      throw std::invalid_argument(
          "simulate: frame " + std::to_string(f) + " ground truth is " +
          std::to_string(hr_f.width) + "x" + std::to_string(hr_f.height) +
          ", want " + std::to_string(sr_w) + "x" + std::to_string(sr_h));
    }
    Plane sr(sr_w, sr_h);
    const std::int64_t base = static_cast<std::int64_t>(f) * np;

    for (std::int64_t p = 0; p < np; ++p) {
      if (!anchors.test(base + p)) continue;
      const Rect r = g.patch_rect(static_cast<int>(p));
      anchor_lr_pixels += r.area();
      copy_region(sr, hr_f, r.x * scale, r.y * scale, r.w * scale,
                  r.h * scale);
      if (cfg.anchor_noise_amp > 0.0) {
        for (int y = r.y * scale; y < (r.y + r.h) * scale; ++y) {
          double* dst = sr.row(y);
          for (int x = r.x * scale; x < (r.x + r.w) * scale; ++x) {
            const double u = hash01(cfg.noise_seed,
                                    static_cast<std::uint64_t>(f),
                                    static_cast<std::uint64_t>(y),
                                    static_cast<std::uint64_t>(x));
            dst[x] += (2.0 * u - 1.0) * cfg.anchor_noise_amp;
          }
        }
      }
    }

    for (const SubBlock& sb : subs[static_cast<std::size_t>(f)]) {
      if (anchors.test(base + sb.patch_id)) continue;
      const BlockRecord& blk =
          fr.blocks[static_cast<std::size_t>(sb.block_id)];
      const Rect local{sb.rect.x - blk.rect.x, sb.rect.y - blk.rect.y,
                       sb.rect.w, sb.rect.h};
      const Plane piece = crop(blk.payload, local);
      const Plane up = bilinear_resample(piece, static_cast<double>(scale));
      const int dx0 = sb.rect.x * scale;
      const int dy0 = sb.rect.y * scale;
      if (sb.mode == BlockMode::kIntra) {
        paste(sr, up, dx0, dy0);
      } else {
        const Plane& ref_sr = sr_cache.at(sb.ref_frame);
        const int sx0 = sb.source.x * scale;
        const int sy0 = sb.source.y * scale;
        for (int y = 0; y < up.height; ++y) {
          double* dst = sr.row(dy0 + y) + dx0;
          const double* ref = ref_sr.row(sy0 + y) + sx0;
          const double* res = up.row(y);
          for (int x = 0; x < up.width; ++x) dst[x] = ref[x] + res[x];
        }
      }
    }

    std::vector<double>& errs =
        report.frame_patch_errors.emplace_back(static_cast<std::size_t>(np),
                                               0.0);
    double frame_se = 0.0;
    for (std::int64_t p = 0; p < np; ++p) {
      const Rect r = g.patch_rect(static_cast<int>(p));
      const double se =
          region_squared_error(sr, hr_f, r.x * scale, r.y * scale,
                               r.w * scale, r.h * scale);
      errs[static_cast<std::size_t>(p)] = se;
      frame_se += se;
    }
    report.frame_psnr.push_back(psnr_from_mse(
        frame_se / (static_cast<double>(sr_w) * static_cast<double>(sr_h))));
    total_se += frame_se;

    if (last_use[static_cast<std::size_t>(f)] > f) {
      sr_cache.emplace(f, std::move(sr));
    }
    for (auto it = sr_cache.begin(); it != sr_cache.end();) {
      if (last_use[static_cast<std::size_t>(it->first)] <= f) {
        it = sr_cache.erase(it);
      } else {
        ++it;
      }
    }
  }

  report.total_squared_error = total_se;
  report.sequence_psnr = psnr_from_mse(
      total_se / (static_cast<double>(frames) * sr_w * sr_h));
  report.anchor_pixel_fraction =
      static_cast<double>(anchor_lr_pixels) /
      (static_cast<double>(frames) * g.frame_w * g.frame_h);
  return report;
}

SimReport simulate(const Trace& t, const AnchorSet& anchors,
                   const std::vector<Plane>& hr_frames, const SimCfg& cfg) {
  if (hr_frames.size() != t.frames.size()) {
    throw std::invalid_argument(
        "simulate: " + std::to_string(hr_frames.size()) +
        " ground-truth frames for a " + std::to_string(t.frames.size()) +
        "-frame trace");
  }
  return simulate(
      t, anchors,
      [&hr_frames](int f) { return hr_frames[static_cast<std::size_t>(f)]; },
      cfg);
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("spearman: length mismatch");
  }
  const std::size_t n = xs.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (n < 2) return nan;
  const std::vector<double> rx = average_ranks(xs);
  const std::vector<double> ry = average_ranks(ys);
  const double mean = 0.5 * (static_cast<double>(n) + 1.0);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ax = rx[i] - mean;
    const double ay = ry[i] - mean;
    sxy += ax * ay;
    sxx += ax * ax;
    syy += ay * ay;
  }
  if (sxx == 0.0 || syy == 0.0) return nan;  // constant input: undefined
  return sxy / std::sqrt(sxx * syy);
}

CompareStats compare(const ErrorEstimate& est, const SimReport& measured) {
  if (est.frame_errors.size() != measured.frame_patch_errors.size()) {
    throw std::invalid_argument("compare: frame count mismatch");
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t f = 0; f < est.frame_errors.size(); ++f) {
    const auto& e = est.frame_errors[f];
    const auto& m = measured.frame_patch_errors[f];
    if (e.size() != m.size()) {
      throw std::invalid_argument("compare: patch count mismatch at frame " +
                                  std::to_string(f));
    }
    xs.insert(xs.end(), e.begin(), e.end());
    ys.insert(ys.end(), m.begin(), m.end());
  }
  CompareStats stats;
  stats.count = static_cast<std::int64_t>(xs.size());
  stats.spearman_rho = spearman(xs, ys);
  return stats;
}

}  // namespace srsched
