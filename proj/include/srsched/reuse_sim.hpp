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

#ifndef SRSCHED_REUSE_SIM_HPP_
#define SRSCHED_REUSE_SIM_HPP_

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "srsched/estimator.hpp"
#include "srsched/pixels.hpp"
#include "srsched/trace.hpp"

namespace srsched {

// Supplies the ground-truth high-resolution frame for an index, so callers
// can stream frames from any backing store instead of holding them all.
using HrSource = std::function<Plane(int)>;

struct SimCfg {
  // Anchor patches normally receive the exact high-resolution pixels. A
  // positive amplitude adds seeded uniform noise in [-amp, +amp] to them,
  // to probe sensitivity to imperfect upscaling.
  double anchor_noise_amp = 0.0;
  std::uint64_t noise_seed = 0;
};

struct SimReport {
  // Measured squared error against the high-resolution frame, [frame][patch].
  std::vector<std::vector<double>> frame_patch_errors;
  // Per-frame PSNR; +infinity when a frame reconstructs exactly.
  std::vector<double> frame_psnr;
  // PSNR of the squared error pooled over every pixel of the sequence.
  double sequence_psnr = std::numeric_limits<double>::infinity();
  double total_squared_error = 0.0;
  // Fraction of patch pixels handled by anchors (the upscaling-cost proxy).
  double anchor_pixel_fraction = 0.0;
};

// Pixel-level reference decoder for reuse-based upscaling. Per frame, per
// patch: anchors copy the true high-resolution crop; other patches are
// rebuilt sub-block by sub-block — inter from the cached upscaled reference
// region at the motion vector times scale plus the bilinearly upscaled
// residual, intra as the bilinearly upscaled decoded low-resolution pixels.
// The upscaled-frame cache mirrors the codec's reference structure. Each
// patch's squared error against the true frame is measured in doubles.
// Anchor set length must be frames x patches; every high-resolution frame
// must have the low-resolution dimensions times scale.
SimReport simulate(const Trace& t, const AnchorSet& anchors,
                   const HrSource& hr, const SimCfg& cfg = {});
SimReport simulate(const Trace& t, const AnchorSet& anchors,
                   const std::vector<Plane>& hr_frames, const SimCfg& cfg = {});

// Spearman rank correlation with average ranks for ties. NaN when either
// side is constant (undefined) or shorter than two samples.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

struct CompareStats {
  double spearman_rho = std::numeric_limits<double>::quiet_NaN();
  std::int64_t count = 0;
};

// Rank agreement between estimated and measured per-patch errors, flattened
// frame-major. Dimensions must match.
CompareStats compare(const ErrorEstimate& est, const SimReport& measured);

}  // namespace srsched

#endif  // SRSCHED_REUSE_SIM_HPP_
