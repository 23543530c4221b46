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

#include "srsched/trace.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "srsched/errors.hpp"
#include "srsched/pixels.hpp"

namespace srsched {
namespace {

// Two frames on a 8x4 frame with 4x4 patches (one row, two columns).
// Frame 1 is inter with motion that straddles the patch boundary.
Trace two_frame_trace() {
  Trace t;
  t.grid = PatchGrid{8, 4, 4, 4};
  t.scale = 4;

  FrameRecord f0;
  f0.frame_index = 0;
  f0.is_keyframe = true;
  f0.blocks.push_back(
      BlockRecord{Rect{0, 0, 4, 4}, BlockMode::kIntra, -1, 0, 0, Plane(4, 4)});
  f0.blocks.push_back(
      BlockRecord{Rect{4, 0, 4, 4}, BlockMode::kIntra, -1, 0, 0, Plane(4, 4)});
  t.frames.push_back(std::move(f0));

  FrameRecord f1;
  f1.frame_index = 1;
  f1.is_keyframe = false;
  f1.ref_frames = {0};
  f1.blocks.push_back(
      BlockRecord{Rect{0, 0, 4, 4}, BlockMode::kInter, 0, 3, 0, Plane(4, 4)});
  f1.blocks.push_back(
      BlockRecord{Rect{4, 0, 4, 4}, BlockMode::kInter, 0, -2, 0, Plane(4, 4)});
  t.frames.push_back(std::move(f1));
  return t;
}

// Full-cover single intra block, for quickly assembling frame chains.
FrameRecord intra_frame(int index, const PatchGrid& g, bool key = false) {
  FrameRecord fr;
  fr.frame_index = index;
  fr.is_keyframe = key;
  fr.blocks.push_back(BlockRecord{Rect{0, 0, g.frame_w, g.frame_h},
                                  BlockMode::kIntra, -1, 0, 0,
                                  Plane(g.frame_w, g.frame_h)});
  return fr;
}

TEST_CASE("patch grid divides with the last row and column absorbing") {
  const PatchGrid g{854, 480, 170, 160};
  CHECK(g.num_cols() == 5);
  CHECK(g.num_rows() == 3);
  CHECK(g.num_patches() == 15);
  const Rect last = g.patch_rect(2, 4);
  CHECK(last.x == 680);
  CHECK(last.w == 174);  // 854 - 4*170 absorbed
  CHECK(last.y == 320);
  CHECK(last.h == 160);
  CHECK(g.patch_index(1, 2) == 7);
  CHECK(g.patch_rect(7) == g.patch_rect(1, 2));
  CHECK(g.col_at(853) == 4);
  CHECK(g.row_at(479) == 2);
  CHECK(g.col_at(679) == 3);
  CHECK_THROWS_AS(g.patch_rect(3, 0), std::invalid_argument);
  CHECK_THROWS_AS(g.patch_rect(-1), std::invalid_argument);
}

TEST_CASE("grid validation") {
  CHECK_NOTHROW(validate_grid(PatchGrid{16, 16, 16, 16}));
  CHECK_THROWS_AS(validate_grid(PatchGrid{100, 100, 170, 160}),
                  std::invalid_argument);
  CHECK_THROWS_AS(validate_grid(PatchGrid{100, 100, 0, 10}),
                  std::invalid_argument);
}

TEST_CASE("motion source clamps as a whole rect") {
  CHECK(clamped_source(Rect{2, 1, 3, 2}, 4, 10, 10, 6) == Rect{6, 4, 3, 2});
  CHECK(clamped_source(Rect{2, 1, 3, 2}, -5, 0, 10, 6) == Rect{0, 1, 3, 2});
  CHECK(clamped_source(Rect{0, 0, 8, 4}, 3, 0, 8, 4) == Rect{0, 0, 8, 4});
}

TEST_CASE("a well-formed trace validates") {
  CHECK_NOTHROW(validate_trace(two_frame_trace()));
}

TEST_CASE("validation names the offending frame and block") {
  SUBCASE("tiling gap") {
    Trace t = two_frame_trace();
    t.frames[0].blocks[1].rect.w = 3;
    t.frames[0].blocks[1].payload = Plane(3, 4);
    CHECK_THROWS_WITH_AS(validate_trace(t),
                         doctest::Contains("frame 0"), ValidationError);
  }
  SUBCASE("tiling overlap") {
    Trace t = two_frame_trace();
    t.frames[0].blocks[1].rect.x = 3;
    CHECK_THROWS_WITH_AS(validate_trace(t),
                         doctest::Contains("frame 0"), ValidationError);
  }
  SUBCASE("payload dimension mismatch") {
    Trace t = two_frame_trace();
    t.frames[1].blocks[0].payload = Plane(3, 4);
    CHECK_THROWS_WITH_AS(validate_trace(t),
                         doctest::Contains("frame 1 block 0"),
                         ValidationError);
  }
  SUBCASE("keyframe must not reference") {
    Trace t = two_frame_trace();
    t.frames[1].is_keyframe = true;
    CHECK_THROWS_WITH_AS(validate_trace(t),
                         doctest::Contains("frame 1"), ValidationError);
  }
  SUBCASE("reference slot out of range") {
    Trace t = two_frame_trace();
    t.frames[1].blocks[0].ref_slot = 2;
    CHECK_THROWS_WITH_AS(validate_trace(t),
                         doctest::Contains("frame 1 block 0"),
                         ValidationError);
  }
  SUBCASE("frame indices must be contiguous") {
    Trace t = two_frame_trace();
    t.frames[1].frame_index = 5;
    CHECK_THROWS_AS(validate_trace(t), ValidationError);
  }
  SUBCASE("duplicate references") {
    Trace t = two_frame_trace();
    t.frames[1].ref_frames = {0, 0};
    CHECK_THROWS_AS(validate_trace(t), ValidationError);
  }
  SUBCASE("future references") {
    Trace t = two_frame_trace();
    t.frames[1].ref_frames = {1};
    CHECK_THROWS_AS(validate_trace(t), ValidationError);
  }
  SUBCASE("more than three references") {
    Trace t;
    t.grid = PatchGrid{8, 4, 4, 4};
    for (int f = 0; f < 4; ++f) {
      t.frames.push_back(intra_frame(f, t.grid, f == 0));
    }
    FrameRecord f4 = intra_frame(4, t.grid);
    f4.ref_frames = {3, 2, 1, 0};
    t.frames.push_back(std::move(f4));
    CHECK_THROWS_WITH_AS(validate_trace(t),
                         doctest::Contains("frame 4"), ValidationError);
  }
}

TEST_CASE("trace container round trips bit for bit") {
  Trace t = two_frame_trace();
  // Non-trivial payload bits, including a negative zero.
  t.frames[1].blocks[0].payload.at(1, 2) = -0.0;
  t.frames[1].blocks[0].payload.at(2, 2) = 1.0 / 3.0;
  t.frames[0].blocks[0].payload.at(0, 0) = 200.5;
  const std::string path = "trace_roundtrip.srtrace";
  save_trace(t, path);
  const Trace back = load_trace(path);
  CHECK(traces_bit_equal(back, t));
  std::remove(path.c_str());
}

TEST_CASE("trace loader rejects corrupted containers") {
  Trace t = two_frame_trace();
  const std::string path = "trace_corrupt.srtrace";
  save_trace(t, path);

  SUBCASE("bad magic") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.put('X');
    f.close();
    CHECK_THROWS_AS(load_trace(path), FormatError);
  }
  SUBCASE("unsupported version") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(8);
    f.put(static_cast<char>(99));
    f.close();
    CHECK_THROWS_AS(load_trace(path), FormatError);
  }
  SUBCASE("truncated payload") {
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    in.close();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(),
              static_cast<std::streamsize>(bytes.size() - 16));
    out.close();
    CHECK_THROWS_AS(load_trace(path), FormatError);
  }
  std::remove(path.c_str());
}

TEST_CASE("missing trace file raises an io error") {
  CHECK_THROWS_AS(load_trace("no_such_trace.srtrace"), IoError);
}

TEST_CASE("blocks split at patch boundaries with pixel-exact reference "
          "counts") {
  const Trace t = two_frame_trace();
  const auto subs = split_blocks(t);
  REQUIRE(subs.size() == 2);

  // Keyframe: two intra sub-blocks, one per patch.
  REQUIRE(subs[0].size() == 2);
  CHECK(subs[0][0].patch_id == 0);
  CHECK(subs[0][0].mode == BlockMode::kIntra);
  CHECK(subs[0][1].patch_id == 1);

  // Frame 1, block 0: rect stays in patch 0, source (3,0,4,4) overlaps
  // patch 0 by a 1x4 strip and patch 1 by a 3x4 strip.
  REQUIRE(subs[1].size() == 2);
  const SubBlock& a = subs[1][0];
  CHECK(a.block_id == 0);
  CHECK(a.patch_id == 0);
  CHECK(a.rect == Rect{0, 0, 4, 4});
  CHECK(a.source == Rect{3, 0, 4, 4});
  CHECK(a.ref_frame == 0);
  REQUIRE(a.refs.size() == 2);
  CHECK(a.refs[0] == RefContribution{0, 4});
  CHECK(a.refs[1] == RefContribution{1, 12});

  // Frame 1, block 1: source (2,0,4,4) splits 8 / 8.
  const SubBlock& b = subs[1][1];
  CHECK(b.patch_id == 1);
  CHECK(b.source == Rect{2, 0, 4, 4});
  REQUIRE(b.refs.size() == 2);
  CHECK(b.refs[0] == RefContribution{0, 8});
  CHECK(b.refs[1] == RefContribution{1, 8});
}

TEST_CASE("sub-block reference counts always sum to the sub-block area") {
  const Trace t = two_frame_trace();
  for (const auto& frame_subs : split_blocks(t)) {
    for (const SubBlock& sb : frame_subs) {
      if (sb.mode != BlockMode::kInter) continue;
      std::int64_t total = 0;
      for (const RefContribution& rc : sb.refs) total += rc.pixels;
      CHECK(total == sb.rect.area());
    }
  }
}

}  // namespace
}  // namespace srsched
