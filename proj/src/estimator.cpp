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

#include <algorithm>
#include <stdexcept>

#include "srsched/parallel.hpp"

namespace srsched {

ErrorEstimate estimate_sequential(const ErrorDag& d, const AnchorSet& a) {
  const int np = d.grid.num_patches();
  const std::size_t F = d.frames.size();
  if (a.size() != static_cast<std::int64_t>(F) * np) {
    throw std::invalid_argument("estimate: anchor set length mismatch");
  }

  ErrorEstimate e;
  e.frame_errors.resize(F);
  for (std::size_t f = 0; f < F; ++f) {
    const DagFrame& fr = d.frames[f];
    std::vector<double>& fe = e.frame_errors[f];
    fe.assign(static_cast<std::size_t>(np), 0.0);
    const std::int64_t base = static_cast<std::int64_t>(f) * np;
    for (int p = 0; p < np; ++p) {
      if (a.test(base + p)) continue;  // anchors stay exactly 0
      double acc = fr.tc.values[static_cast<std::size_t>(p)];
      for (const DagEdgeGroup& g : fr.in_edges) {
        const std::vector<double>& src =
            e.frame_errors[static_cast<std::size_t>(g.ref_frame_index)];
        const WeightMatrix& w = g.weights;
        for (std::int64_t k = w.row_ptr[p]; k < w.row_ptr[p + 1]; ++k) {
          acc += w.weight[static_cast<std::size_t>(k)] *
                 src[static_cast<std::size_t>(
                     w.col_idx[static_cast<std::size_t>(k)])];
        }
      }
      fe[static_cast<std::size_t>(p)] = acc;
    }
  }

  double total = 0.0;
  for (const std::vector<double>& fe : e.frame_errors) {
    for (const double v : fe) total += v;
  }
  e.total = total;
  return e;
}

namespace {

// One CSR row's multiply-accumulate over batch columns [b0, b1). Four matrix
// entries per sweep; per column each += still lands in ascending-k order, so
// the chain of adds matches the sequential path exactly.
void axpy_row(const WeightMatrix& w, int p, const double* src_matrix,
              std::int64_t stride, double* row, std::int64_t b0,
              std::int64_t b1) {
  std::int64_t k = w.row_ptr[p];
  const std::int64_t k_end = w.row_ptr[p + 1];
  for (; k + 4 <= k_end; k += 4) {
    const double w0 = w.weight[static_cast<std::size_t>(k)];
    const double w1 = w.weight[static_cast<std::size_t>(k + 1)];
    const double w2 = w.weight[static_cast<std::size_t>(k + 2)];
    const double w3 = w.weight[static_cast<std::size_t>(k + 3)];
    const double* s0 =
        src_matrix + static_cast<std::size_t>(
                         w.col_idx[static_cast<std::size_t>(k)]) * stride;
    const double* s1 =
        src_matrix + static_cast<std::size_t>(
                         w.col_idx[static_cast<std::size_t>(k + 1)]) * stride;
    const double* s2 =
        src_matrix + static_cast<std::size_t>(
                         w.col_idx[static_cast<std::size_t>(k + 2)]) * stride;
    const double* s3 =
        src_matrix + static_cast<std::size_t>(
                         w.col_idx[static_cast<std::size_t>(k + 3)]) * stride;
    for (std::int64_t b = b0; b < b1; ++b) {
      double acc = row[b];
      acc = acc + w0 * s0[b];
      acc = acc + w1 * s1[b];
      acc = acc + w2 * s2[b];
      acc = acc + w3 * s3[b];
      row[b] = acc;
    }
  }
  for (; k < k_end; ++k) {
    const double wv = w.weight[static_cast<std::size_t>(k)];
    const double* s =
        src_matrix + static_cast<std::size_t>(
                         w.col_idx[static_cast<std::size_t>(k)]) * stride;
    for (std::int64_t b = b0; b < b1; ++b) {
      row[b] += wv * s[b];
    }
  }
}

// One frame's propagation for batch columns [b0, b1). Each column replays
// the sequential op sequence exactly: init to TC, add weight * source in
// group-then-column order, then pin anchors to zero.
void propagate_frame_columns(const DagFrame& fr,
                             const std::vector<const double*>& frame_matrix,
                             double* out, std::int64_t stride, int np,
                             std::int64_t base,
                             const std::vector<const std::uint8_t*>& anchors,
                             std::int64_t b0, std::int64_t b1) {
  for (int p = 0; p < np; ++p) {
    double* row = out + static_cast<std::size_t>(p) * stride;
    const double tc = fr.tc.values[static_cast<std::size_t>(p)];
    for (std::int64_t b = b0; b < b1; ++b) row[b] = tc;

    for (const DagEdgeGroup& g : fr.in_edges) {
      axpy_row(g.weights, p,
               frame_matrix[static_cast<std::size_t>(g.ref_frame_index)],
               stride, row, b0, b1);
    }

    for (std::int64_t b = b0; b < b1; ++b) {
      if (anchors[static_cast<std::size_t>(b)][base + p]) row[b] = 0.0;
    }
  }
}

// Runs the full batched propagation; E[f] holds frame f's patches x B
// matrix afterwards.
void propagate_all(const ErrorDag& d, const std::vector<AnchorSet>& batch,
                   int threads, std::vector<std::vector<double>>& E) {
  const int np = d.grid.num_patches();
  const std::size_t F = d.frames.size();
  const std::int64_t B = static_cast<std::int64_t>(batch.size());
  if (B == 0) {
    throw std::invalid_argument("estimate_batched: empty batch");
  }
  for (const AnchorSet& a : batch) {
    if (a.size() != static_cast<std::int64_t>(F) * np) {
      throw std::invalid_argument("estimate_batched: anchor set length mismatch");
    }
  }
  threads = std::max(threads, 1);

  std::vector<const std::uint8_t*> anchors(static_cast<std::size_t>(B));
  for (std::int64_t b = 0; b < B; ++b) {
    anchors[static_cast<std::size_t>(b)] =
        batch[static_cast<std::size_t>(b)].data();
  }

  E.assign(F, {});
  std::vector<const double*> frame_matrix(F, nullptr);
  for (std::size_t f = 0; f < F; ++f) {
    E[f].resize(static_cast<std::size_t>(np) * static_cast<std::size_t>(B));
    const DagFrame& fr = d.frames[f];
    std::int64_t nnz = 0;
    for (const DagEdgeGroup& g : fr.in_edges) nnz += g.weights.nnz();
    const std::int64_t base = static_cast<std::int64_t>(f) * np;
    double* out = E[f].data();
    parallel_for(
        B, threads,
        [&](std::int64_t b0, std::int64_t b1) {
          propagate_frame_columns(fr, frame_matrix, out, B, np, base, anchors,
                                  b0, b1);
        },
        nnz + 2 * np);
    frame_matrix[f] = E[f].data();
  }
}

// Per-column totals in the sequential order (frame-major, patches
// ascending). The sweep is vectorized across columns; each column still
// sees one ordered chain of adds.
std::vector<double> column_totals(const std::vector<std::vector<double>>& E,
                                  int np, std::int64_t B) {
  std::vector<double> totals(static_cast<std::size_t>(B), 0.0);
  double* tot = totals.data();
  for (const std::vector<double>& frame : E) {
    for (int p = 0; p < np; ++p) {
      const double* row = frame.data() + static_cast<std::size_t>(p) * B;
      for (std::int64_t b = 0; b < B; ++b) {
        tot[b] += row[b];
      }
    }
  }
  return totals;
}

}  // namespace

std::vector<ErrorEstimate> estimate_batched(const ErrorDag& d,
                                            const std::vector<AnchorSet>& batch,
                                            int threads) {
  if (batch.empty()) return {};
  const int np = d.grid.num_patches();
  const std::size_t F = d.frames.size();
  std::vector<std::vector<double>> E;
  propagate_all(d, batch, threads, E);
  const std::int64_t B = static_cast<std::int64_t>(batch.size());
  const std::vector<double> totals = column_totals(E, np, B);

  std::vector<ErrorEstimate> result(static_cast<std::size_t>(B));
  for (std::int64_t b = 0; b < B; ++b) {
    ErrorEstimate& e = result[static_cast<std::size_t>(b)];
    e.frame_errors.resize(F);
    for (std::size_t f = 0; f < F; ++f) {
      std::vector<double>& fe = e.frame_errors[f];
      fe.resize(static_cast<std::size_t>(np));
      const double* src = E[f].data();
      for (int p = 0; p < np; ++p) {
        fe[static_cast<std::size_t>(p)] =
            src[static_cast<std::size_t>(p) * B + static_cast<std::size_t>(b)];
      }
    }
    e.total = totals[static_cast<std::size_t>(b)];
  }
  return result;
}

std::vector<double> estimate_batched_totals(const ErrorDag& d,
                                            const std::vector<AnchorSet>& batch,
                                            int threads) {
  if (batch.empty()) return {};
  std::vector<std::vector<double>> E;
  propagate_all(d, batch, threads, E);
  return column_totals(E, d.grid.num_patches(),
                       static_cast<std::int64_t>(batch.size()));
}

std::vector<double> estimate_candidate_totals(
    const ErrorDag& d, const AnchorSet& base,
    const std::vector<std::int64_t>& candidates, int threads) {
  const int np = d.grid.num_patches();
  const std::size_t F = d.frames.size();
  const std::int64_t total = static_cast<std::int64_t>(F) * np;
  if (base.size() != total) {
    throw std::invalid_argument(
        "estimate_candidate_totals: anchor set length mismatch");
  }
  for (const std::int64_t id : candidates) {
    if (id < 0 || id >= total) {
      throw std::invalid_argument(
          "estimate_candidate_totals: candidate id out of range");
    }
  }
  const std::int64_t B = static_cast<std::int64_t>(candidates.size());
  if (B == 0) return {};
  threads = std::max(threads, 1);

  // Ring depth: one slot past the deepest backward reference, so a source
  // frame stays live until the last frame reading it has been propagated.
  std::int64_t depth = 1;
  std::int64_t work = 0;
  for (std::size_t f = 0; f < F; ++f) {
    for (const DagEdgeGroup& g : d.frames[f].in_edges) {
      depth = std::max(
          depth, static_cast<std::int64_t>(f) - g.ref_frame_index + 1);
      work += g.weights.nnz();
    }
    work += 2 * np;
  }
  const std::int64_t S = std::min(depth, static_cast<std::int64_t>(F));
  const std::size_t slot_doubles =
      static_cast<std::size_t>(np) * static_cast<std::size_t>(B);

  // Candidate cells grouped by frame, pinned to zero right after the frame
  // is propagated: later frames then read them as exact-anchor sources, and
  // the frame's totals see the zero. A candidate already in the base lands
  // on an already-zero row, matching the no-op union.
  std::vector<std::vector<std::pair<int, std::int64_t>>> fixups(F);
  for (std::int64_t b = 0; b < B; ++b) {
    const std::int64_t id = candidates[static_cast<std::size_t>(b)];
    fixups[static_cast<std::size_t>(id / np)].push_back(
        {static_cast<int>(id % np), b});
  }

  std::vector<double> totals(static_cast<std::size_t>(B), 0.0);
  std::vector<double> ring(static_cast<std::size_t>(S) * slot_doubles);
  double* const ring_data = ring.data();
  double* const tot = totals.data();
  const std::uint8_t* const base_bits = base.data();

  parallel_for(
      B, threads,
      [&](std::int64_t b0, std::int64_t b1) {
        for (std::size_t f = 0; f < F; ++f) {
          const DagFrame& fr = d.frames[f];
          double* const slot =
              ring_data +
              static_cast<std::size_t>(static_cast<std::int64_t>(f) % S) *
                  slot_doubles;
          const std::int64_t gbase = static_cast<std::int64_t>(f) * np;
          for (int p = 0; p < np; ++p) {
            double* row = slot + static_cast<std::size_t>(p) * B;
            if (base_bits[gbase + p]) {
              std::fill(row + b0, row + b1, 0.0);
              continue;
            }
            const double tc = fr.tc.values[static_cast<std::size_t>(p)];
            for (std::int64_t b = b0; b < b1; ++b) row[b] = tc;
            for (const DagEdgeGroup& g : fr.in_edges) {
              const double* src =
                  ring_data +
                  static_cast<std::size_t>(g.ref_frame_index % S) *
                      slot_doubles;
              axpy_row(g.weights, p, src, B, row, b0, b1);
            }
          }
          for (const auto& [p, col] : fixups[f]) {
            if (col >= b0 && col < b1) {
              slot[static_cast<std::size_t>(p) * B +
                   static_cast<std::size_t>(col)] = 0.0;
            }
          }
          // Frame-major, patches ascending: the accumulation order of the
          // sequential path's final reduction.
          for (int p = 0; p < np; ++p) {
            const double* row = slot + static_cast<std::size_t>(p) * B;
            for (std::int64_t b = b0; b < b1; ++b) tot[b] += row[b];
          }
        }
      },
      std::max<std::int64_t>(work, 1));
  return totals;
}

}  // namespace srsched
