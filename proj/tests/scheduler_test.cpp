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

#include "srsched/scheduler.hpp"

#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "srsched/complexity.hpp"
#include "srsched/dag.hpp"
#include "srsched/errors.hpp"
#include "srsched/estimator.hpp"
#include "srsched/rng.hpp"
#include "srsched/toy_codec.hpp"
#include "srsched/trace.hpp"
#include "testutil.hpp"

namespace srsched {
namespace {

ScheduleCfg budget_cfg(int budget) {
  ScheduleCfg cfg;
  cfg.budget = budget;
  return cfg;
}

// All-intra DAG (no edges) whose estimate is just the TC, making greedy
// behavior checkable on paper: 2 frames x 3 patches.
ErrorDag flat_dag() {
  ErrorDag d;
  d.grid = PatchGrid{30, 8, 10, 8};  // 3 columns, 1 row
  d.frames.resize(2);
  d.frames[0].frame_index = 0;
  d.frames[0].is_keyframe = true;
  d.frames[0].tc.frame_index = 0;
  d.frames[0].tc.values = {5.0, 1.0, 5.0};
  d.frames[1].frame_index = 1;
  d.frames[1].tc.frame_index = 1;
  d.frames[1].tc.values = {3.0, 9.0, 0.0};
  return d;
}

// All-intra trace with the given keyframe flags on a 15-patch grid.
Trace intra_trace(const std::vector<bool>& keyframes) {
  Trace t;
  t.grid = PatchGrid{50, 24, 10, 8};  // 5 columns x 3 rows
  t.scale = 4;
  for (std::size_t f = 0; f < keyframes.size(); ++f) {
    FrameRecord fr;
    fr.frame_index = static_cast<int>(f);
    fr.is_keyframe = keyframes[f];
    fr.blocks.push_back(BlockRecord{Rect{0, 0, 50, 24}, BlockMode::kIntra,
                                    -1, 0, 0, Plane(50, 24)});
    t.frames.push_back(std::move(fr));
  }
  return t;
}

std::vector<std::int64_t> set_ids(const AnchorSet& a) {
  std::vector<std::int64_t> ids;
  for (std::int64_t i = 0; i < a.size(); ++i) {
    if (a.test(i)) ids.push_back(i);
  }
  return ids;
}

TEST_CASE("budget resolution") {
  ScheduleCfg cfg;
  CHECK_THROWS_AS(resolve_budget(cfg, 100), std::invalid_argument);

  cfg.budget = 5;
  cfg.budget_ratio = 0.1;
  CHECK_THROWS_AS(resolve_budget(cfg, 100), std::invalid_argument);

  cfg = ScheduleCfg{};
  cfg.budget_ratio = 1.5;
  CHECK_THROWS_AS(resolve_budget(cfg, 100), std::invalid_argument);

  cfg = ScheduleCfg{};
  cfg.budget = 101;
  CHECK_THROWS_AS(resolve_budget(cfg, 100), std::invalid_argument);

  cfg = ScheduleCfg{};
  cfg.budget_ratio = 0.05;
  CHECK(resolve_budget(cfg, 900) == 45);
  CHECK(resolve_budget(cfg, 99) == 4);  // floor

  cfg = ScheduleCfg{};
  cfg.budget_ratio = 1.0;
  CHECK(resolve_budget(cfg, 10) == 10);

  cfg = ScheduleCfg{};
  cfg.budget = 0;
  CHECK(resolve_budget(cfg, 10) == 0);

  CHECK_THROWS_AS(resolve_budget(cfg, 0), std::invalid_argument);
}

TEST_CASE("zero budget selects nothing") {
  const auto [anchors, traj] = greedy_select(flat_dag(), budget_cfg(0));
  CHECK(anchors.count() == 0);
  CHECK(traj.steps.empty());
}

TEST_CASE("first greedy pick is the exhaustive argmin") {
  Rng rng(101);
  for (int rep = 0; rep < 10; ++rep) {
    const ErrorDag d = testutil::random_dag(rng);
    const std::int64_t total = d.total_patches();

    double best = std::numeric_limits<double>::infinity();
    std::int64_t best_id = -1;
    for (std::int64_t id = 0; id < total; ++id) {
      AnchorSet a(total);
      a.set(id);
      const double t = estimate_sequential(d, a).total;
      if (t < best) {
        best = t;
        best_id = id;
      }
    }

    const auto [anchors, traj] = greedy_select(d, budget_cfg(1));
    REQUIRE(traj.steps.size() == 1);
    CHECK(traj.steps[0].patch_id == best_id);
    CHECK(traj.steps[0].total_error == best);
    CHECK(anchors.count() == 1);
    CHECK(anchors.test(best_id));
  }
}

TEST_CASE("without edges greedy takes the largest tc, ties to smaller id") {
  const auto [anchors, traj] = greedy_select(flat_dag(), budget_cfg(3));
  REQUIRE(traj.steps.size() == 3);
  // TC: {5, 1, 5} / {3, 9, 0}; totals start at 23.
  CHECK(traj.steps[0].patch_id == 4);  // tc 9
  CHECK(traj.steps[0].total_error == 14.0);
  CHECK(traj.steps[1].patch_id == 0);  // tc 5 tie against id 2
  CHECK(traj.steps[1].total_error == 9.0);
  CHECK(traj.steps[2].patch_id == 2);
  CHECK(traj.steps[2].total_error == 4.0);
  CHECK(set_ids(anchors) == std::vector<std::int64_t>{0, 2, 4});
}

TEST_CASE("batch chunking and threads never change the selection") {
  Rng rng(111);
  for (int rep = 0; rep < 5; ++rep) {
    const ErrorDag d = testutil::random_dag(rng);
    const int budget =
        static_cast<int>(std::min<std::int64_t>(d.total_patches(), 7));
    ScheduleCfg ref_cfg = budget_cfg(budget);
    ref_cfg.candidate_batch = 1024;
    const auto [ref_set, ref_traj] = greedy_select(d, ref_cfg);

    for (int cb : {1, 3}) {
      for (int th : {1, 3}) {
        ScheduleCfg cfg = budget_cfg(budget);
        cfg.candidate_batch = cb;
        cfg.threads = th;
        const auto [got_set, got_traj] = greedy_select(d, cfg);
        CHECK(got_set == ref_set);
        REQUIRE(got_traj.steps.size() == ref_traj.steps.size());
        for (std::size_t s = 0; s < ref_traj.steps.size(); ++s) {
          CHECK(got_traj.steps[s].patch_id == ref_traj.steps[s].patch_id);
          CHECK(got_traj.steps[s].total_error ==
                ref_traj.steps[s].total_error);
        }
      }
    }
  }
}

TEST_CASE("greedy trajectories never increase") {
  Rng rng(121);
  for (int rep = 0; rep < 10; ++rep) {
    const ErrorDag d = testutil::random_dag(rng);
    const int budget = static_cast<int>(d.total_patches() / 2);
    const auto [anchors, traj] = greedy_select(d, budget_cfg(budget));
    CHECK(anchors.count() == budget);
    for (std::size_t s = 1; s < traj.steps.size(); ++s) {
      CHECK(traj.steps[s].total_error <= traj.steps[s - 1].total_error);
    }
  }
}

TEST_CASE("uniformly scaling tc does not change the pick order") {
  Rng rng(131);
  const ErrorDag d = testutil::random_dag(rng);
  ErrorDag scaled = d;
  for (DagFrame& f : scaled.frames) {
    for (double& v : f.tc.values) v *= 2.0;
  }
  const int budget = static_cast<int>(d.total_patches() / 3);
  const auto [set_a, traj_a] = greedy_select(d, budget_cfg(budget));
  const auto [set_b, traj_b] = greedy_select(scaled, budget_cfg(budget));
  CHECK(set_a == set_b);
  REQUIRE(traj_a.steps.size() == traj_b.steps.size());
  for (std::size_t s = 0; s < traj_a.steps.size(); ++s) {
    CHECK(traj_a.steps[s].patch_id == traj_b.steps[s].patch_id);
  }
}

TEST_CASE("no swap of the final pick improves the estimate") {
  Rng rng(141);
  const ErrorDag d = testutil::random_dag(rng);
  const int budget =
      static_cast<int>(std::min<std::int64_t>(d.total_patches() / 2, 6));
  if (budget < 1) return;
  const auto [anchors, traj] = greedy_select(d, budget_cfg(budget));
  const int last = traj.steps.back().patch_id;
  const double achieved = traj.steps.back().total_error;

  AnchorSet base = anchors;
  base.set(last, false);
  for (std::int64_t id = 0; id < d.total_patches(); ++id) {
    if (base.test(id) || id == last) continue;
    AnchorSet swapped = base;
    swapped.set(id);
    CHECK(estimate_sequential(d, swapped).total >= achieved);
  }
}

TEST_CASE("key-uniform spreads the leftover budget at equal strides") {
  const Trace t = intra_trace({true, false});

  SUBCASE("keys plus a spread remainder") {
    const AnchorSet a = baseline_key_uniform(t, budget_cfg(18));
    // All 15 keyframe patches, then 3 of 15 leftover at stride 5.
    std::vector<std::int64_t> want;
    for (int i = 0; i < 15; ++i) want.push_back(i);
    want.push_back(15 + 0);
    want.push_back(15 + 5);
    want.push_back(15 + 10);
    CHECK(set_ids(a) == want);
  }
  SUBCASE("budget equal to keyframe patches") {
    const AnchorSet a = baseline_key_uniform(t, budget_cfg(15));
    CHECK(a.count() == 15);
    for (int i = 0; i < 15; ++i) CHECK(a.test(i));
  }
  SUBCASE("budget equal to everything") {
    const AnchorSet a = baseline_key_uniform(t, budget_cfg(30));
    CHECK(a.count() == 30);
  }
  SUBCASE("budget below keyframe patches") {
    CHECK_THROWS_AS(baseline_key_uniform(t, budget_cfg(14)),
                    std::invalid_argument);
  }
}

TEST_CASE("key-uniform budgets apply per keyframe-aligned interval") {
  const Trace t = intra_trace({true, false, true, false});
  const AnchorSet a = baseline_key_uniform(t, budget_cfg(18));
  CHECK(a.count() == 36);
  for (int f : {0, 2}) {
    for (int p = 0; p < 15; ++p) CHECK(a.test(f * 15 + p));
  }
  for (int f : {1, 3}) {
    for (int p = 0; p < 15; ++p) {
      CHECK(a.test(f * 15 + p) == (p % 5 == 0));
    }
  }
}

TEST_CASE("ablations strip exactly one signal") {
  Rng rng(151);
  const ErrorDag d = testutil::random_dag(rng);

  SUBCASE("flat tc keeps the edges") {
    const ErrorDag flat = ablated_dag(d, AblationMode::kNoTc);
    REQUIRE(flat.frames.size() == d.frames.size());
    for (std::size_t f = 0; f < d.frames.size(); ++f) {
      for (double v : flat.frames[f].tc.values) CHECK(v == 1.0);
      REQUIRE(flat.frames[f].in_edges.size() ==
              d.frames[f].in_edges.size());
      for (std::size_t g = 0; g < d.frames[f].in_edges.size(); ++g) {
        CHECK(flat.frames[f].in_edges[g].ref_frame_index ==
              d.frames[f].in_edges[g].ref_frame_index);
        CHECK(flat.frames[f].in_edges[g].weights.col_idx ==
              d.frames[f].in_edges[g].weights.col_idx);
        CHECK(flat.frames[f].in_edges[g].weights.weight ==
              d.frames[f].in_edges[g].weights.weight);
      }
    }
    CHECK(validate_dag(flat).all_pass());
  }
  SUBCASE("identity edges keep the tc") {
    const ErrorDag ident = ablated_dag(d, AblationMode::kNoWeight);
    const std::int64_t np = d.num_patches_per_frame();
    for (std::size_t f = 0; f < d.frames.size(); ++f) {
      CHECK(ident.frames[f].tc.values == d.frames[f].tc.values);
      if (f == 0) {
        CHECK(ident.frames[f].in_edges.empty());
        continue;
      }
      REQUIRE(ident.frames[f].in_edges.size() == 1);
      const DagEdgeGroup& g = ident.frames[f].in_edges[0];
      CHECK(g.ref_frame_index == static_cast<int>(f) - 1);
      REQUIRE(g.weights.nnz() == np);
      for (std::int64_t i = 0; i < np; ++i) {
        CHECK(g.weights.col_idx[static_cast<std::size_t>(i)] == i);
        CHECK(g.weights.weight[static_cast<std::size_t>(i)] == 1.0);
      }
    }
    CHECK(validate_dag(ident).all_pass());
  }
}

TEST_CASE("profile bits pack little-endian with zero padding") {
  const PatchGrid grid{50, 24, 10, 8};  // 15 patches
  AnchorSet a(15);
  a.set(0);
  a.set(3);
  const std::vector<std::uint8_t> bytes = profile_encode(a, grid, 1);
  CHECK(bytes == std::vector<std::uint8_t>{0x09, 0x00});

  const AnchorSet back = profile_decode(bytes, grid, 1);
  CHECK(back == a);

  SUBCASE("wrong byte count") {
    CHECK_THROWS_AS(profile_decode({0x09}, grid, 1), FormatError);
    CHECK_THROWS_AS(profile_decode({0x09, 0x00, 0x00}, grid, 1),
                    FormatError);
  }
  SUBCASE("nonzero padding") {
    CHECK_THROWS_AS(profile_decode({0x09, 0x80}, grid, 1), FormatError);
  }
  SUBCASE("set length mismatch") {
    CHECK_THROWS_AS(profile_encode(a, grid, 2), std::invalid_argument);
  }
  SUBCASE("random round trips") {
    Rng rng(161);
    for (int rep = 0; rep < 20; ++rep) {
      const int frames = static_cast<int>(rng.next_int(1, 6));
      const AnchorSet s = testutil::random_set(
          rng, static_cast<std::int64_t>(frames) * grid.num_patches(), 0.3);
      CHECK(profile_decode(profile_encode(s, grid, frames), grid, frames) ==
            s);
    }
  }
}

TEST_CASE("profile container round trips and rejects corruption") {
  Rng rng(171);
  CacheProfile p;
  p.num_frames = 4;
  p.num_patch_rows = 3;
  p.num_patch_cols = 5;
  p.anchors = testutil::random_set(rng, 4 * 15, 0.4);
  const std::string path = "profile_roundtrip.srpf";
  save_profile(p, path);

  SUBCASE("round trip") {
    const CacheProfile back = load_profile(path);
    CHECK(back.num_frames == p.num_frames);
    CHECK(back.num_patch_rows == p.num_patch_rows);
    CHECK(back.num_patch_cols == p.num_patch_cols);
    CHECK(back.anchors == p.anchors);
  }
  SUBCASE("bad magic") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.put('X');
    f.close();
    CHECK_THROWS_AS(load_profile(path), FormatError);
  }
  SUBCASE("unsupported version") {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(4);
    f.put(static_cast<char>(9));
    f.close();
    CHECK_THROWS_AS(load_profile(path), FormatError);
  }
  SUBCASE("truncated payload") {
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    in.close();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(),
              static_cast<std::streamsize>(bytes.size() - 2));
    out.close();
    CHECK_THROWS_AS(load_profile(path), FormatError);
  }
  SUBCASE("trailing bytes") {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out.put('\0');
    out.close();
    CHECK_THROWS_AS(load_profile(path), FormatError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_profile("no_such.srpf"), IoError);
  }
  SUBCASE("set length must match the header") {
    CacheProfile bad = p;
    bad.num_frames = 5;
    CHECK_THROWS_AS(save_profile(bad, path), std::invalid_argument);
  }
  std::remove(path.c_str());
}

TEST_CASE("profile text draws one grid per frame") {
  CacheProfile p;
  p.num_frames = 1;
  p.num_patch_rows = 3;
  p.num_patch_cols = 5;
  p.anchors = AnchorSet(15);
  p.anchors.set(0);
  p.anchors.set(7);
  const std::string text = profile_text(p);
  CHECK(text ==
        "cache-profile frames=1 rows=3 cols=5 anchors=2\n"
        "frame 0: A.... ..A.. .....\n");
}

TEST_CASE("interval partition: fixed length or keyframe-aligned") {
  Rng rng(181);
  ErrorDag d = testutil::random_dag(rng);
  d.frames.resize(std::min<std::size_t>(d.frames.size(), 4));

  SUBCASE("fixed length") {
    ErrorDag ten = flat_dag();
    ten.frames.resize(10);
    for (int f = 0; f < 10; ++f) {
      ten.frames[f].frame_index = f;
      ten.frames[f].is_keyframe = (f == 0);
      ten.frames[f].tc.frame_index = f;
      ten.frames[f].tc.values.assign(3, 1.0);
      ten.frames[f].in_edges.clear();
    }
    const auto parts = partition_intervals(ten, 4);
    REQUIRE(parts.size() == 3);
    CHECK(parts[0] == std::pair<int, int>{0, 4});
    CHECK(parts[1] == std::pair<int, int>{4, 8});
    CHECK(parts[2] == std::pair<int, int>{8, 10});
  }
  SUBCASE("keyframe aligned") {
    ErrorDag nine = flat_dag();
    nine.frames.resize(9);
    for (int f = 0; f < 9; ++f) {
      nine.frames[f].frame_index = f;
      nine.frames[f].is_keyframe = (f % 3 == 0);
      nine.frames[f].tc.frame_index = f;
      nine.frames[f].tc.values.assign(3, 1.0);
      nine.frames[f].in_edges.clear();
    }
    const auto parts = partition_intervals(nine, 0);
    REQUIRE(parts.size() == 3);
    CHECK(parts[0] == std::pair<int, int>{0, 3});
    CHECK(parts[1] == std::pair<int, int>{3, 6});
    CHECK(parts[2] == std::pair<int, int>{6, 9});
  }
  SUBCASE("no interior keyframes give one interval") {
    const auto parts = partition_intervals(d, 0);
    bool interior_key = false;
    for (std::size_t f = 1; f < d.frames.size(); ++f) {
      interior_key = interior_key || d.frames[f].is_keyframe;
    }
    if (!interior_key) {
      REQUIRE(parts.size() == 1);
      CHECK(parts[0] ==
            std::pair<int, int>{0, static_cast<int>(d.frames.size())});
    }
  }
}

TEST_CASE("whole-stream scheduling dispatches per interval") {
  SynthParams sp;
  sp.width = 64;
  sp.height = 48;
  sp.num_frames = 8;
  sp.seed = 9;
  sp.num_rects = 2;
  EncoderCfg ec;
  ec.block_size = 8;
  ec.search_range = 4;
  ec.gop = 4;
  ec.patch_w = 5;
  ec.patch_h = 4;
  const Trace t = encode(downscale(synth_video(sp), 4), ec);
  const ErrorDag d = build_dag(t, compute_tc(t));
  const std::int64_t np = d.num_patches_per_frame();

  SUBCASE("per-frame anchors everything") {
    const ScheduleResult res =
        schedule_dag(d, budget_cfg(0), ScheduleMethod::kPerFrame);
    CHECK(res.anchors.count() == d.total_patches());
    CHECK(res.trajectories.empty());
    CHECK_FALSE(res.intervals.empty());
  }
  SUBCASE("key-uniform on the dag equals the trace baseline") {
    ScheduleCfg cfg = budget_cfg(static_cast<int>(np) * 2);
    const ScheduleResult res =
        schedule_dag(d, cfg, ScheduleMethod::kKeyUniform);
    const AnchorSet direct = baseline_key_uniform(t, cfg);
    CHECK(res.anchors == direct);
    CHECK(res.trajectories.empty());
  }
  SUBCASE("greedy merges per-interval selections") {
    ScheduleCfg cfg = budget_cfg(5);
    cfg.interval = 3;
    const ScheduleResult res =
        schedule_dag(d, cfg, ScheduleMethod::kGreedy);
    REQUIRE(res.intervals.size() == 3);
    REQUIRE(res.trajectories.size() == 3);
    CHECK(res.anchors.count() == 15);

    AnchorSet manual(d.total_patches());
    for (const auto& [begin, end] : res.intervals) {
      const ErrorDag sub = extract_interval(d, begin, end);
      const AnchorSet picked = greedy_select(sub, cfg).first;
      for (std::int64_t i = 0; i < picked.size(); ++i) {
        if (picked.test(i)) {
          manual.set(static_cast<std::int64_t>(begin) * np + i);
        }
      }
    }
    CHECK(res.anchors == manual);
  }
  SUBCASE("ablation methods come back with trajectories") {
    ScheduleCfg cfg = budget_cfg(4);
    for (ScheduleMethod m :
         {ScheduleMethod::kNoWeight, ScheduleMethod::kNoTc}) {
      const ScheduleResult res = schedule_dag(d, cfg, m);
      CHECK(res.anchors.count() ==
            static_cast<std::int64_t>(res.intervals.size()) * 4);
      CHECK(res.trajectories.size() == res.intervals.size());
    }
  }
}

}  // namespace
}  // namespace srsched
