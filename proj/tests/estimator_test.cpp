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

#include "srsched/estimator.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

#include "srsched/dag.hpp"
#include "srsched/rng.hpp"
#include "testutil.hpp"

namespace srsched {
namespace {

// Two frames, two patches per frame. Frame 1 draws from frame 0 with a
// hand-picked weight pattern so the recurrence is checkable on paper.
ErrorDag tiny_dag() {
  ErrorDag d;
  d.grid = PatchGrid{20, 8, 10, 8};  // 2 columns, 1 row
  d.frames.resize(2);

  d.frames[0].frame_index = 0;
  d.frames[0].is_keyframe = true;
  d.frames[0].tc.frame_index = 0;
  d.frames[0].tc.values = {4.0, 9.0};

  d.frames[1].frame_index = 1;
  d.frames[1].tc.frame_index = 1;
  d.frames[1].tc.values = {1.0, 2.0};
  DagEdgeGroup g;
  g.ref_frame_index = 0;
  g.weights.rows = 2;
  g.weights.cols = 2;
  g.weights.row_ptr = {0, 2, 3};
  g.weights.col_idx = {0, 1, 1};
  g.weights.weight = {0.5, 0.25, 0.75};
  d.frames[1].in_edges.push_back(std::move(g));
  return d;
}

TEST_CASE("anchorset basics") {
  AnchorSet a(5);
  CHECK(a.size() == 5);
  CHECK(a.count() == 0);
  a.set(1);
  a.set(3);
  CHECK(a.count() == 2);
  CHECK(a.test(1));
  CHECK_FALSE(a.test(0));
  a.set(1, false);
  CHECK(a.count() == 1);

  AnchorSet b(5);
  b.set(3);
  CHECK(a == b);
}

TEST_CASE("hand recurrence: errors accumulate weight times source error") {
  const ErrorDag d = tiny_dag();

  SUBCASE("no anchors") {
    const ErrorEstimate e = estimate_sequential(d, AnchorSet(4));
    REQUIRE(e.frame_errors.size() == 2);
    CHECK(e.frame_errors[0][0] == 4.0);
    CHECK(e.frame_errors[0][1] == 9.0);
    // Patch (1,0): 1 + 0.5*4 + 0.25*9 = 5.25. Patch (1,1): 2 + 0.75*9.
    CHECK(e.frame_errors[1][0] == 5.25);
    CHECK(e.frame_errors[1][1] == 8.75);
    CHECK(e.total == 4.0 + 9.0 + 5.25 + 8.75);
    CHECK(total_quality(e) == -e.total);
  }
  SUBCASE("anchoring a source zeroes its contribution downstream") {
    AnchorSet a(4);
    a.set(1);  // patch 1 of frame 0
    const ErrorEstimate e = estimate_sequential(d, a);
    CHECK(e.frame_errors[0][1] == 0.0);
    CHECK(e.frame_errors[1][0] == 1.0 + 0.5 * 4.0);
    CHECK(e.frame_errors[1][1] == 2.0);
  }
  SUBCASE("anchoring a dependent pins it to zero") {
    AnchorSet a(4);
    a.set(2);  // patch 0 of frame 1
    const ErrorEstimate e = estimate_sequential(d, a);
    CHECK(e.frame_errors[1][0] == 0.0);
    CHECK(e.frame_errors[1][1] == 8.75);
  }
  SUBCASE("all anchors give zero everywhere") {
    AnchorSet a(4);
    for (int i = 0; i < 4; ++i) a.set(i);
    const ErrorEstimate e = estimate_sequential(d, a);
    CHECK(e.total == 0.0);
    for (const auto& fe : e.frame_errors) {
      for (double v : fe) CHECK(v == 0.0);
    }
  }
}

TEST_CASE("without edges the estimate is the tc itself") {
  Rng rng(21);
  for (int rep = 0; rep < 5; ++rep) {
    ErrorDag d = testutil::random_dag(rng);
    for (DagFrame& f : d.frames) f.in_edges.clear();
    const ErrorEstimate e = estimate_sequential(d, AnchorSet(d.total_patches()));
    for (std::size_t f = 0; f < d.frames.size(); ++f) {
      for (int i = 0; i < d.grid.num_patches(); ++i) {
        CHECK(e.frame_errors[f][i] == d.frames[f].tc.values[i]);
      }
    }
  }
}

TEST_CASE("batched estimates are bit-identical to sequential") {
  Rng rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    const ErrorDag d = testutil::random_dag(rng);
    std::vector<AnchorSet> batch;
    for (int b = 0; b < 5; ++b) {
      batch.push_back(
          testutil::random_set(rng, d.total_patches(), 0.2 * b));
    }
    const std::vector<ErrorEstimate> got = estimate_batched(d, batch);
    REQUIRE(got.size() == batch.size());
    for (std::size_t b = 0; b < batch.size(); ++b) {
      const ErrorEstimate want = estimate_sequential(d, batch[b]);
      CHECK(got[b].total == want.total);
      REQUIRE(got[b].frame_errors.size() == want.frame_errors.size());
      for (std::size_t f = 0; f < want.frame_errors.size(); ++f) {
        REQUIRE(got[b].frame_errors[f].size() ==
                want.frame_errors[f].size());
        for (std::size_t i = 0; i < want.frame_errors[f].size(); ++i) {
          CHECK(got[b].frame_errors[f][i] == want.frame_errors[f][i]);
        }
      }
    }
  }
}

TEST_CASE("totals fast path equals the full batched path") {
  Rng rng(41);
  for (int rep = 0; rep < 10; ++rep) {
    const ErrorDag d = testutil::random_dag(rng);
    std::vector<AnchorSet> batch;
    for (int b = 0; b < 7; ++b) {
      batch.push_back(
          testutil::random_set(rng, d.total_patches(), 0.15 * b));
    }
    const std::vector<double> totals = estimate_batched_totals(d, batch);
    REQUIRE(totals.size() == batch.size());
    for (std::size_t b = 0; b < batch.size(); ++b) {
      CHECK(totals[b] == estimate_sequential(d, batch[b]).total);
    }
  }
}

TEST_CASE("thread count never changes a single bit") {
  Rng rng(51);
  const ErrorDag d = testutil::random_dag(rng);
  std::vector<AnchorSet> batch;
  for (int b = 0; b < 9; ++b) {
    batch.push_back(testutil::random_set(rng, d.total_patches(), 0.3));
  }
  const std::vector<double> t1 = estimate_batched_totals(d, batch, 1);
  const std::vector<double> t2 = estimate_batched_totals(d, batch, 2);
  const std::vector<double> t5 = estimate_batched_totals(d, batch, 5);
  CHECK(t1 == t2);
  CHECK(t1 == t5);

  const auto e1 = estimate_batched(d, batch, 1);
  const auto e3 = estimate_batched(d, batch, 3);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    CHECK(e1[b].total == e3[b].total);
    CHECK(e1[b].frame_errors == e3[b].frame_errors);
  }
}

TEST_CASE("candidate totals equal sequential with the candidate added") {
  Rng rng(61);
  for (int rep = 0; rep < 20; ++rep) {
    const ErrorDag d = testutil::random_dag(rng);
    const std::int64_t total = d.total_patches();
    const AnchorSet base = testutil::random_set(rng, total, 0.25);
    // Every id, including ones the base already anchors (a no-op union).
    std::vector<std::int64_t> cands;
    for (std::int64_t id = 0; id < total; ++id) cands.push_back(id);
    const std::vector<double> got = estimate_candidate_totals(d, base, cands);
    REQUIRE(got.size() == cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) {
      AnchorSet u = base;
      u.set(cands[i]);
      CHECK(got[i] == estimate_sequential(d, u).total);
    }
  }
}

TEST_CASE("candidate totals are thread-count invariant") {
  Rng rng(71);
  const ErrorDag d = testutil::random_dag(rng);
  const AnchorSet base = testutil::random_set(rng, d.total_patches(), 0.3);
  std::vector<std::int64_t> cands;
  for (std::int64_t id = 0; id < d.total_patches(); id += 2) {
    cands.push_back(id);
  }
  const std::vector<double> t1 = estimate_candidate_totals(d, base, cands, 1);
  const std::vector<double> t2 = estimate_candidate_totals(d, base, cands, 2);
  const std::vector<double> t5 = estimate_candidate_totals(d, base, cands, 5);
  CHECK(t1 == t2);
  CHECK(t1 == t5);
}

// Frame 4 draws directly from frame 0: the deepest reference determines how
// long a frame's errors must stay available to later frames.
ErrorDag long_reach_dag() {
  ErrorDag d;
  d.grid = PatchGrid{20, 8, 10, 8};  // 2 patches per frame
  d.frames.resize(5);
  for (int f = 0; f < 5; ++f) {
    d.frames[static_cast<std::size_t>(f)].frame_index = f;
    d.frames[static_cast<std::size_t>(f)].tc.frame_index = f;
    d.frames[static_cast<std::size_t>(f)].tc.values = {1.0 + f, 2.0 + f};
  }
  d.frames[0].is_keyframe = true;
  DagEdgeGroup g;
  g.ref_frame_index = 0;
  g.weights.rows = 2;
  g.weights.cols = 2;
  g.weights.row_ptr = {0, 1, 2};
  g.weights.col_idx = {0, 1};
  g.weights.weight = {0.5, 0.5};
  d.frames[4].in_edges.push_back(g);
  DagEdgeGroup h = g;
  h.ref_frame_index = 1;
  d.frames[2].in_edges.push_back(std::move(h));
  return d;
}

TEST_CASE("candidate totals handle references reaching far back") {
  const ErrorDag d = long_reach_dag();
  AnchorSet base(d.total_patches());
  base.set(3);
  std::vector<std::int64_t> cands;
  for (std::int64_t id = 0; id < d.total_patches(); ++id) {
    cands.push_back(id);
  }
  const std::vector<double> got = estimate_candidate_totals(d, base, cands);
  REQUIRE(got.size() == cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) {
    AnchorSet u = base;
    u.set(cands[i]);
    CHECK(got[i] == estimate_sequential(d, u).total);
  }
}

TEST_CASE("anchoring more never increases any patch error") {
  Rng rng(61);
  for (int rep = 0; rep < 50; ++rep) {
    const ErrorDag d = testutil::random_dag(rng);
    AnchorSet base = testutil::random_set(rng, d.total_patches(), 0.2);
    AnchorSet super = base;
    for (std::int64_t i = 0; i < super.size(); ++i) {
      if (!super.test(i) && rng.next_double() < 0.25) super.set(i);
    }
    const ErrorEstimate eb = estimate_sequential(d, base);
    const ErrorEstimate es = estimate_sequential(d, super);
    for (std::size_t f = 0; f < eb.frame_errors.size(); ++f) {
      for (std::size_t i = 0; i < eb.frame_errors[f].size(); ++i) {
        CHECK(es.frame_errors[f][i] <=
              eb.frame_errors[f][i] * (1.0 + 1e-12));
      }
    }
    CHECK(es.total <= eb.total * (1.0 + 1e-12));
  }
}

TEST_CASE("estimates are finite and nonnegative, anchors exactly zero") {
  Rng rng(71);
  for (int rep = 0; rep < 10; ++rep) {
    const ErrorDag d = testutil::random_dag(rng);
    const AnchorSet a = testutil::random_set(rng, d.total_patches(), 0.4);
    const ErrorEstimate e = estimate_sequential(d, a);
    const int np = d.grid.num_patches();
    for (std::size_t f = 0; f < e.frame_errors.size(); ++f) {
      for (int i = 0; i < np; ++i) {
        const double v = e.frame_errors[f][i];
        CHECK(std::isfinite(v));
        CHECK(v >= 0.0);
        if (a.test(static_cast<std::int64_t>(f) * np + i)) {
          CHECK(v == 0.0);
        }
      }
    }
  }
}

TEST_CASE("input validation") {
  const ErrorDag d = tiny_dag();
  CHECK_THROWS_AS(estimate_sequential(d, AnchorSet(3)),
                  std::invalid_argument);
  CHECK(estimate_batched(d, {}).empty());
  CHECK(estimate_batched_totals(d, {}).empty());
  std::vector<AnchorSet> bad{AnchorSet(4), AnchorSet(5)};
  CHECK_THROWS_AS(estimate_batched(d, bad), std::invalid_argument);
  CHECK_THROWS_AS(estimate_batched_totals(d, bad, 0),
                  std::invalid_argument);
  CHECK(estimate_candidate_totals(d, AnchorSet(4), {}).empty());
  CHECK_THROWS_AS(estimate_candidate_totals(d, AnchorSet(3), {0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_candidate_totals(d, AnchorSet(4), {4}),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_candidate_totals(d, AnchorSet(4), {-1}),
                  std::invalid_argument);
}

}  // namespace
}  // namespace srsched
