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

#ifndef SRSCHED_COMPLEXITY_HPP_
#define SRSCHED_COMPLEXITY_HPP_

#include <vector>

#include "srsched/pixels.hpp"
#include "srsched/trace.hpp"

namespace srsched {

// Texture complexity of one frame's patches: how much SR detail each patch
// sources locally, as opposed to inheriting from its references. Computed
// from LR-side data only.
struct TcVector {
  int frame_index = 0;
  std::vector<double> values;  // length num_patches, indexed by patch id
};

// Detail lost by halving and restoring the resolution:
// squared_error_sum(upscale-to-original(bilinear_resample(p, 0.5)), p).
// Exactly 0 for constant planes, grows with texture frequency. Total for
// any dimensions (1x1 included).
double halving_detail_loss(const Plane& p);

// Complexity of an intra block's decoded LR content.
inline double intra_block_complexity(const Plane& lr) {
  return halving_detail_loss(lr);
}

// Complexity of an inter block's residual (same kernel; residuals may be
// negative-valued).
inline double inter_block_complexity(const Plane& res) {
  return halving_detail_loss(res);
}

// Per-frame TC: every sub-block's complexity, evaluated on the sub-block's
// crop of its payload (residual for inter, decoded content for intra), is
// accumulated into the containing patch's entry in sub-block order. Cropping
// keeps each patch's TC a function of pixels inside that patch alone.
std::vector<TcVector> compute_tc(const Trace& t);

}  // namespace srsched

#endif  // SRSCHED_COMPLEXITY_HPP_
