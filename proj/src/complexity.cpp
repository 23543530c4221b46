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

#include "srsched/complexity.hpp"

namespace srsched {

double halving_detail_loss(const Plane& p) {
  const Plane down = bilinear_resample(p, 0.5);
  const Plane restored = bilinear_resample_to(down, p.width, p.height);
  return squared_error_sum(restored, p);
}

std::vector<TcVector> compute_tc(const Trace& t) {
  const std::vector<std::vector<SubBlock>> subs = split_blocks(t);
  const int np = t.grid.num_patches();

  std::vector<TcVector> out(t.frames.size());
  for (std::size_t fi = 0; fi < t.frames.size(); ++fi) {
    TcVector& tc = out[fi];
    tc.frame_index = static_cast<int>(fi);
    tc.values.assign(static_cast<std::size_t>(np), 0.0);
    const FrameRecord& fr = t.frames[fi];
    for (const SubBlock& sb : subs[fi]) {
      const BlockRecord& blk =
          fr.blocks[static_cast<std::size_t>(sb.block_id)];
      // Payload planes are block-local; shift the sub-block rect into them.
      const Rect local{sb.rect.x - blk.rect.x, sb.rect.y - blk.rect.y,
                       sb.rect.w, sb.rect.h};
      tc.values[static_cast<std::size_t>(sb.patch_id)] +=
          halving_detail_loss(crop(blk.payload, local));
    }
  }
  return out;
}

}  // namespace srsched
