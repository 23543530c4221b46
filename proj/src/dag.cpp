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

#include "srsched/dag.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "srsched/errors.hpp"

namespace srsched {

namespace {

using nlohmann::json;

std::int64_t patch_area(const PatchGrid& g, int patch_id) {
  return g.patch_rect(patch_id).area();
}

}  // namespace

ErrorDag build_dag(const Trace& t, const std::vector<TcVector>& tc) {
  if (tc.size() != t.frames.size()) {
    throw std::invalid_argument("build_dag: tc frame count mismatch");
  }
  const int np = t.grid.num_patches();
  for (std::size_t i = 0; i < tc.size(); ++i) {
    if (tc[i].frame_index != static_cast<int>(i) ||
        static_cast<int>(tc[i].values.size()) != np) {
      throw std::invalid_argument("build_dag: tc vector does not match trace");
    }
  }

  const std::vector<std::vector<SubBlock>> subs = split_blocks(t);

  ErrorDag d;
  d.grid = t.grid;
  d.frames.resize(t.frames.size());
  for (std::size_t fi = 0; fi < t.frames.size(); ++fi) {
    DagFrame& df = d.frames[fi];
    df.frame_index = static_cast<int>(fi);
    df.is_keyframe = t.frames[fi].is_keyframe;
    df.tc = tc[fi];

    // Exact integer pixel counts per (ref_frame, dep_patch, ref_patch);
    // a single division at the end keeps full-reuse weights exactly 1.0.
    std::map<int, std::vector<std::int64_t>> counts;  // ref -> np*np dense
    for (const SubBlock& sb : subs[fi]) {
      if (sb.mode != BlockMode::kInter) continue;
      std::vector<std::int64_t>& grid_counts = counts[sb.ref_frame];
      if (grid_counts.empty()) {
        grid_counts.assign(static_cast<std::size_t>(np) * np, 0);
      }
      for (const RefContribution& rc : sb.refs) {
        grid_counts[static_cast<std::size_t>(sb.patch_id) * np +
                    rc.ref_patch] += rc.pixels;
      }
    }

    for (const auto& [ref, grid_counts] : counts) {
      DagEdgeGroup group;
      group.ref_frame_index = ref;
      WeightMatrix& w = group.weights;
      w.rows = np;
      w.cols = np;
      w.row_ptr.assign(static_cast<std::size_t>(np) + 1, 0);
      for (int r = 0; r < np; ++r) {
        for (int c = 0; c < np; ++c) {
          const std::int64_t pixels =
              grid_counts[static_cast<std::size_t>(r) * np + c];
          if (pixels == 0) continue;
          w.col_idx.push_back(c);
          w.weight.push_back(static_cast<double>(pixels) /
                             static_cast<double>(patch_area(t.grid, c)));
        }
        w.row_ptr[static_cast<std::size_t>(r) + 1] =
            static_cast<std::int64_t>(w.col_idx.size());
      }
      df.in_edges.push_back(std::move(group));  // map iterates refs ascending
    }
  }
  return d;
}

namespace {

void add_check(DagReport& report, const std::string& name, bool pass,
               std::string detail) {
  report.checks.push_back(DagCheck{name, pass, pass ? "" : std::move(detail)});
}

}  // namespace

DagReport validate_dag(const ErrorDag& d) {
  DagReport report;

  bool grid_ok = true;
  std::string grid_detail;
  try {
    validate_grid(d.grid);
  } catch (const std::invalid_argument& e) {
    grid_ok = false;
    grid_detail = e.what();
  }
  add_check(report, "grid", grid_ok, grid_detail);
  if (!grid_ok) return report;

  const int np = d.grid.num_patches();

  bool indices_ok = true;
  std::string indices_detail;
  for (std::size_t i = 0; i < d.frames.size() && indices_ok; ++i) {
    if (d.frames[i].frame_index != static_cast<int>(i)) {
      indices_ok = false;
      indices_detail = "frame slot " + std::to_string(i) + " holds index " +
                       std::to_string(d.frames[i].frame_index);
    }
  }
  add_check(report, "frame_indices_contiguous", indices_ok, indices_detail);

  bool refs_ok = true;
  std::string refs_detail;
  for (const DagFrame& f : d.frames) {
    if (f.in_edges.size() > 3) {
      refs_ok = false;
      refs_detail = "frame " + std::to_string(f.frame_index) + " has " +
                    std::to_string(f.in_edges.size()) + " edge groups";
      break;
    }
    int prev_ref = -1;
    for (const DagEdgeGroup& g : f.in_edges) {
      if (g.ref_frame_index < 0 || g.ref_frame_index >= f.frame_index) {
        refs_ok = false;
        refs_detail = "frame " + std::to_string(f.frame_index) +
                      " references frame " +
                      std::to_string(g.ref_frame_index);
        break;
      }
      if (g.ref_frame_index <= prev_ref) {
        refs_ok = false;
        refs_detail = "frame " + std::to_string(f.frame_index) +
                      ": edge groups not strictly ascending by reference";
        break;
      }
      prev_ref = g.ref_frame_index;
    }
    if (!refs_ok) break;
  }
  add_check(report, "references_acyclic_ordered", refs_ok, refs_detail);

  bool csr_ok = true;
  std::string csr_detail;
  bool weights_ok = true;
  std::string weights_detail;
  for (const DagFrame& f : d.frames) {
    for (const DagEdgeGroup& g : f.in_edges) {
      const WeightMatrix& w = g.weights;
      const std::string where = "frame " + std::to_string(f.frame_index) +
                                " -> " + std::to_string(g.ref_frame_index);
      if (w.rows != np || w.cols != np ||
          w.row_ptr.size() != static_cast<std::size_t>(np) + 1 ||
          w.row_ptr.front() != 0 ||
          w.row_ptr.back() != static_cast<std::int64_t>(w.col_idx.size()) ||
          w.col_idx.size() != w.weight.size()) {
        csr_ok = false;
        csr_detail = where + ": malformed CSR shape";
      }
      if (!csr_ok) break;
      for (int r = 0; r < np; ++r) {
        if (w.row_ptr[r] > w.row_ptr[r + 1]) {
          csr_ok = false;
          csr_detail = where + ": row_ptr not monotone at row " +
                       std::to_string(r);
          break;
        }
        std::int32_t prev = -1;
        for (std::int64_t k = w.row_ptr[r]; k < w.row_ptr[r + 1]; ++k) {
          const std::int32_t c = w.col_idx[static_cast<std::size_t>(k)];
          if (c <= prev || c >= np) {
            csr_ok = false;
            csr_detail = where + ": bad column order at row " +
                         std::to_string(r);
            break;
          }
          prev = c;
          const double v = w.weight[static_cast<std::size_t>(k)];
          if (weights_ok && (!(v > 0.0) || !std::isfinite(v))) {
            weights_ok = false;
            weights_detail = where + ": weight " + std::to_string(v) +
                             " at patch " + std::to_string(r);
          }
        }
        if (!csr_ok) break;
      }
      if (!csr_ok) break;
    }
    if (!csr_ok) break;
  }
  add_check(report, "csr_well_formed", csr_ok, csr_detail);
  add_check(report, "weights_positive_finite", weights_ok, weights_detail);

  bool tc_ok = true;
  std::string tc_detail;
  for (const DagFrame& f : d.frames) {
    if (static_cast<int>(f.tc.values.size()) != np ||
        f.tc.frame_index != f.frame_index) {
      tc_ok = false;
      tc_detail = "frame " + std::to_string(f.frame_index) + ": tc shape";
      break;
    }
    for (int p = 0; p < np; ++p) {
      const double v = f.tc.values[static_cast<std::size_t>(p)];
      if (v < 0.0 || !std::isfinite(v)) {
        tc_ok = false;
        tc_detail = "frame " + std::to_string(f.frame_index) + " patch " +
                    std::to_string(p) + ": tc " + std::to_string(v);
        break;
      }
    }
    if (!tc_ok) break;
  }
  add_check(report, "tc_nonnegative_finite", tc_ok, tc_detail);

  // Reuse bound: a patch's inter sub-blocks tile at most the patch, so the
  // source pixels its in-edges claim — weight times reference patch area,
  // summed over every edge group of the frame — never exceed the patch's
  // own area. (Distinct dependents may claim the same reference pixels, so
  // no bound holds along the reference axis.)
  bool bound_ok = true;
  std::string bound_detail;
  if (csr_ok && indices_ok) {
    std::vector<double> claimed(static_cast<std::size_t>(np));
    for (const DagFrame& f : d.frames) {
      if (!bound_ok) break;
      if (f.in_edges.empty()) continue;
      std::fill(claimed.begin(), claimed.end(), 0.0);
      for (const DagEdgeGroup& g : f.in_edges) {
        const WeightMatrix& w = g.weights;
        for (int r = 0; r < np; ++r) {
          for (std::int64_t k = w.row_ptr[r]; k < w.row_ptr[r + 1]; ++k) {
            const int c = w.col_idx[static_cast<std::size_t>(k)];
            claimed[static_cast<std::size_t>(r)] +=
                w.weight[static_cast<std::size_t>(k)] *
                static_cast<double>(patch_area(d.grid, c));
          }
        }
      }
      for (int p = 0; p < np; ++p) {
        const double cap = static_cast<double>(patch_area(d.grid, p));
        if (claimed[static_cast<std::size_t>(p)] > cap * (1.0 + 1e-9)) {
          bound_ok = false;
          bound_detail = "frame " + std::to_string(f.frame_index) + " patch " +
                         std::to_string(p) + ": claimed " +
                         std::to_string(claimed[static_cast<std::size_t>(p)]) +
                         " of " + std::to_string(cap) + " pixels";
          break;
        }
      }
    }
  }
  add_check(report, "reuse_bound", bound_ok, bound_detail);

  return report;
}

DegreeReport degree_of_reference(const Trace& t) {
  validate_trace(t);
  const int W = t.grid.frame_w;
  const int H = t.grid.frame_h;
  const std::size_t frame_px = static_cast<std::size_t>(W) * H;

  // refs[f](x, y) = how many later-frame pixels motion-compensate from
  // pixel (x, y) of frame f.
  std::vector<std::vector<std::uint32_t>> refs(t.frames.size());
  for (auto& plane : refs) plane.assign(frame_px, 0);

  for (const FrameRecord& fr : t.frames) {
    for (const BlockRecord& b : fr.blocks) {
      if (b.mode != BlockMode::kInter) continue;
      const int ref_frame =
          fr.ref_frames[static_cast<std::size_t>(b.ref_slot)];
      const Rect src = clamped_source(b.rect, b.dx, b.dy, W, H);
      std::vector<std::uint32_t>& target =
          refs[static_cast<std::size_t>(ref_frame)];
      for (int y = 0; y < src.h; ++y) {
        std::uint32_t* row =
            target.data() + static_cast<std::size_t>(src.y + y) * W + src.x;
        for (int x = 0; x < src.w; ++x) {
          ++row[x];
        }
      }
    }
  }

  DegreeReport out;
  out.frame_degree.resize(t.frames.size());
  for (std::size_t fi = 0; fi < t.frames.size(); ++fi) {
    std::uint64_t total = 0;
    for (const std::uint32_t v : refs[fi]) total += v;
    out.frame_degree[fi] =
        static_cast<double>(total) / static_cast<double>(frame_px);

    for (const BlockRecord& b : t.frames[fi].blocks) {
      std::uint64_t hits = 0;
      for (int y = 0; y < b.rect.h; ++y) {
        const std::uint32_t* row =
            refs[fi].data() + static_cast<std::size_t>(b.rect.y + y) * W +
            b.rect.x;
        for (int x = 0; x < b.rect.w; ++x) hits += row[x];
      }
      const double degree =
          static_cast<double>(hits) / static_cast<double>(b.rect.area());
      if (b.mode == BlockMode::kIntra) {
        out.intra_block_degrees.push_back(degree);
      } else {
        out.inter_block_degrees.push_back(degree);
      }
    }
  }
  return out;
}

double cles(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.empty() || ys.empty()) {
    throw std::invalid_argument("cles: empty sample list");
  }
  std::vector<double> sorted = ys;
  std::sort(sorted.begin(), sorted.end());
  double score = 0.0;
  for (const double x : xs) {
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), x);
    const auto hi = std::upper_bound(lo, sorted.end(), x);
    const double wins = static_cast<double>(lo - sorted.begin());
    const double ties = static_cast<double>(hi - lo);
    score += wins + 0.5 * ties;
  }
  return score /
         (static_cast<double>(xs.size()) * static_cast<double>(ys.size()));
}

namespace {

constexpr char kDagMagic[8] = {'S', 'R', 'E', 'R', 'R', 'D', 'A', 'G'};
constexpr std::uint8_t kDagVersion = 1;

template <typename T>
void write_array(std::ofstream& f, const std::vector<T>& v) {
  f.write(reinterpret_cast<const char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
void read_array(std::ifstream& f, std::vector<T>& v, std::size_t count) {
  v.resize(count);
  f.read(reinterpret_cast<char*>(v.data()),
         static_cast<std::streamsize>(count * sizeof(T)));
}

}  // namespace

void save_dag(const ErrorDag& d, const std::string& path) {
  const int np = d.grid.num_patches();
  std::uint64_t off = 0;
  json frames = json::array();
  for (const DagFrame& f : d.frames) {
    json jf;
    jf["index"] = f.frame_index;
    jf["key"] = f.is_keyframe;
    jf["tc_off"] = off;
    off += static_cast<std::uint64_t>(np) * sizeof(double);
    json groups = json::array();
    for (const DagEdgeGroup& g : f.in_edges) {
      json jg;
      jg["ref"] = g.ref_frame_index;
      jg["nnz"] = g.weights.nnz();
      jg["row_off"] = off;
      off += (static_cast<std::uint64_t>(np) + 1) * sizeof(std::int64_t);
      jg["col_off"] = off;
      off += static_cast<std::uint64_t>(g.weights.nnz()) * sizeof(std::int32_t);
      jg["w_off"] = off;
      off += static_cast<std::uint64_t>(g.weights.nnz()) * sizeof(double);
      groups.push_back(std::move(jg));
    }
    jf["groups"] = std::move(groups);
    frames.push_back(std::move(jf));
  }
  const json header = {{"grid",
                        {{"frame_w", d.grid.frame_w},
                         {"frame_h", d.grid.frame_h},
                         {"patch_w", d.grid.patch_w},
                         {"patch_h", d.grid.patch_h}}},
                       {"payload_bytes", off},
                       {"frames", std::move(frames)}};
  const std::string header_text = header.dump();

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for write: " + path);
  f.write(kDagMagic, sizeof(kDagMagic));
  f.put(static_cast<char>(kDagVersion));
  const std::uint64_t header_len = header_text.size();
  f.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
  f.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  for (const DagFrame& fr : d.frames) {
    write_array(f, fr.tc.values);
    for (const DagEdgeGroup& g : fr.in_edges) {
      write_array(f, g.weights.row_ptr);
      write_array(f, g.weights.col_idx);
      write_array(f, g.weights.weight);
    }
  }
  if (!f) throw IoError("write failed: " + path);
}

ErrorDag load_dag(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);
  char magic[8];
  f.read(magic, sizeof(magic));
  if (!f || std::memcmp(magic, kDagMagic, sizeof(kDagMagic)) != 0) {
    throw FormatError("not a dag file: " + path);
  }
  const int version = f.get();
  if (version != kDagVersion) {
    throw FormatError("unsupported dag version " + std::to_string(version));
  }
  std::uint64_t header_len = 0;
  f.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  if (!f || header_len > (1ull << 32)) throw FormatError("bad dag header length");
  std::string header_text(header_len, '\0');
  f.read(header_text.data(), static_cast<std::streamsize>(header_len));
  if (!f) throw FormatError("truncated dag header");

  json header;
  try {
    header = json::parse(header_text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("dag header is not valid JSON: ") + e.what());
  }

  ErrorDag d;
  try {
    d.grid.frame_w = header.at("grid").at("frame_w").get<int>();
    d.grid.frame_h = header.at("grid").at("frame_h").get<int>();
    d.grid.patch_w = header.at("grid").at("patch_w").get<int>();
    d.grid.patch_h = header.at("grid").at("patch_h").get<int>();
    validate_grid(d.grid);
    const int np = d.grid.num_patches();
    const std::uint64_t payload_bytes =
        header.at("payload_bytes").get<std::uint64_t>();
    const std::streamoff payload_start =
        static_cast<std::streamoff>(sizeof(kDagMagic) + 1 +
                                    sizeof(std::uint64_t) + header_len);

    auto seek_payload = [&](std::uint64_t offset, std::uint64_t need) {
      if (offset + need > payload_bytes) {
        throw FormatError("dag payload offset out of range");
      }
      f.seekg(payload_start + static_cast<std::streamoff>(offset));
    };

    d.frames.resize(header.at("frames").size());
    std::size_t fi = 0;
    for (const json& jf : header.at("frames")) {
      DagFrame& fr = d.frames[fi++];
      fr.frame_index = jf.at("index").get<int>();
      fr.is_keyframe = jf.at("key").get<bool>();
      fr.tc.frame_index = fr.frame_index;
      seek_payload(jf.at("tc_off").get<std::uint64_t>(),
                   static_cast<std::uint64_t>(np) * sizeof(double));
      read_array(f, fr.tc.values, static_cast<std::size_t>(np));
      for (const json& jg : jf.at("groups")) {
        DagEdgeGroup g;
        g.ref_frame_index = jg.at("ref").get<int>();
        const std::uint64_t nnz = jg.at("nnz").get<std::uint64_t>();
        g.weights.rows = np;
        g.weights.cols = np;
        seek_payload(jg.at("row_off").get<std::uint64_t>(),
                     (static_cast<std::uint64_t>(np) + 1) * sizeof(std::int64_t));
        read_array(f, g.weights.row_ptr, static_cast<std::size_t>(np) + 1);
        seek_payload(jg.at("col_off").get<std::uint64_t>(),
                     nnz * sizeof(std::int32_t));
        read_array(f, g.weights.col_idx, static_cast<std::size_t>(nnz));
        seek_payload(jg.at("w_off").get<std::uint64_t>(), nnz * sizeof(double));
        read_array(f, g.weights.weight, static_cast<std::size_t>(nnz));
        fr.in_edges.push_back(std::move(g));
      }
      if (!f) throw FormatError("truncated dag payload");
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("dag header field error: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("dag grid invalid: ") + e.what());
  }

  const DagReport report = validate_dag(d);
  if (!report.all_pass()) {
    for (const DagCheck& c : report.checks) {
      if (!c.pass) {
        throw ValidationError("dag check '" + c.name + "' failed: " + c.detail);
      }
    }
  }
  return d;
}

void dump_dot(const ErrorDag& d, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for write: " + path);
  f << "digraph error_flow {\n  rankdir=LR;\n  node [shape=box];\n";
  for (const DagFrame& fr : d.frames) {
    for (int p = 0; p < d.grid.num_patches(); ++p) {
      f << "  f" << fr.frame_index << "p" << p << " [label=\"F"
        << fr.frame_index << " P" << p << "\\ntc="
        << fr.tc.values[static_cast<std::size_t>(p)] << "\"];\n";
    }
  }
  for (const DagFrame& fr : d.frames) {
    for (const DagEdgeGroup& g : fr.in_edges) {
      const WeightMatrix& w = g.weights;
      for (int r = 0; r < w.rows; ++r) {
        for (std::int64_t k = w.row_ptr[r]; k < w.row_ptr[r + 1]; ++k) {
          f << "  f" << g.ref_frame_index << "p"
            << w.col_idx[static_cast<std::size_t>(k)] << " -> f"
            << fr.frame_index << "p" << r << " [label=\""
            << w.weight[static_cast<std::size_t>(k)] << "\"];\n";
        }
      }
    }
  }
  f << "}\n";
  if (!f) throw IoError("write failed: " + path);
}

ErrorDag extract_interval(const ErrorDag& d, int begin, int end) {
  if (begin < 0 || end > static_cast<int>(d.frames.size()) || begin >= end) {
    throw std::invalid_argument("extract_interval: bad range");
  }
  ErrorDag out;
  out.grid = d.grid;
  out.frames.reserve(static_cast<std::size_t>(end - begin));
  for (int fi = begin; fi < end; ++fi) {
    DagFrame fr = d.frames[static_cast<std::size_t>(fi)];
    fr.frame_index -= begin;
    fr.tc.frame_index = fr.frame_index;
    std::vector<DagEdgeGroup> kept;
    for (DagEdgeGroup& g : fr.in_edges) {
      if (g.ref_frame_index < begin) continue;
      g.ref_frame_index -= begin;
      kept.push_back(std::move(g));
    }
    fr.in_edges = std::move(kept);
    out.frames.push_back(std::move(fr));
  }
  return out;
}

}  // namespace srsched
