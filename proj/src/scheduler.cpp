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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "srsched/errors.hpp"

namespace srsched {

namespace {

constexpr char kProfileMagic[4] = {'S', 'R', 'P', 'F'};
constexpr std::uint8_t kProfileVersion = 1;
constexpr std::uint32_t kMaxProfileDim = 1u << 24;

void write_u32(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {
      static_cast<unsigned char>(v & 0xff),
      static_cast<unsigned char>((v >> 8) & 0xff),
      static_cast<unsigned char>((v >> 16) & 0xff),
      static_cast<unsigned char>((v >> 24) & 0xff),
  };
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is) {
  unsigned char b[4] = {0, 0, 0, 0};
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

std::vector<std::uint8_t> pack_bits(const AnchorSet& a) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>((a.size() + 7) / 8),
                                0);
  for (std::int64_t i = 0; i < a.size(); ++i) {
    if (a.test(i)) {
      out[static_cast<std::size_t>(i >> 3)] |=
          static_cast<std::uint8_t>(1u << (i & 7));
    }
  }
  return out;
}

AnchorSet unpack_bits(const std::vector<std::uint8_t>& bytes,
                      std::int64_t bits) {
  const std::size_t want = static_cast<std::size_t>((bits + 7) / 8);
  if (bytes.size() != want) {
    throw FormatError("cache profile: " + std::to_string(bytes.size()) +
                      " bytes cannot hold exactly " + std::to_string(bits) +
                      " bits (expected " + std::to_string(want) + ")");
  }
  if ((bits & 7) != 0) {
    const std::uint8_t pad =
        static_cast<std::uint8_t>(bytes.back() & (0xffu << (bits & 7)));
    if (pad != 0) {
      throw FormatError("cache profile: nonzero padding bits in final byte");
    }
  }
  AnchorSet a(bits);
  for (std::int64_t i = 0; i < bits; ++i) {
    if ((bytes[static_cast<std::size_t>(i >> 3)] >> (i & 7)) & 1u) a.set(i);
  }
  return a;
}

// Key+Uniform over one interval: is_key holds the interval's per-frame
// keyframe flags, np the patches per frame. Returned set is interval-local.
AnchorSet key_uniform_interval(const std::vector<std::uint8_t>& is_key,
                               std::int64_t np, int budget) {
  const int frames = static_cast<int>(is_key.size());
  const std::int64_t total = static_cast<std::int64_t>(frames) * np;
  AnchorSet out(total);
  std::int64_t key_patches = 0;
  for (int f = 0; f < frames; ++f) {
    if (is_key[f]) key_patches += np;
  }
  if (budget < key_patches) {
    throw std::invalid_argument(
        "key-uniform: budget " + std::to_string(budget) +
        " is below the interval's keyframe patch count " +
        std::to_string(key_patches));
  }
  std::vector<std::int64_t> rest;
  rest.reserve(static_cast<std::size_t>(total - key_patches));
  for (int f = 0; f < frames; ++f) {
    const std::int64_t base = static_cast<std::int64_t>(f) * np;
    if (is_key[f]) {
      for (std::int64_t p = 0; p < np; ++p) out.set(base + p);
    } else {
      for (std::int64_t p = 0; p < np; ++p) rest.push_back(base + p);
    }
  }
  const std::int64_t leftover = budget - key_patches;
  if (leftover > 0) {
    // leftover <= rest.size() because budget <= total.
    const std::int64_t stride =
        static_cast<std::int64_t>(rest.size()) / leftover;
    for (std::int64_t j = 0; j < leftover; ++j) {
      out.set(rest[static_cast<std::size_t>(j * stride)]);
    }
  }
  return out;
}

std::vector<std::pair<int, int>> split_frames(
    const std::vector<std::uint8_t>& is_key, int interval) {
  const int frames = static_cast<int>(is_key.size());
  std::vector<std::pair<int, int>> out;
  if (interval > 0) {
    for (int s = 0; s < frames; s += interval) {
      out.emplace_back(s, std::min(s + interval, frames));
    }
    return out;
  }
  int start = 0;
  for (int f = 1; f < frames; ++f) {
    if (is_key[f]) {
      out.emplace_back(start, f);
      start = f;
    }
  }
  out.emplace_back(start, frames);
  return out;
}

}  // namespace

int resolve_budget(const ScheduleCfg& cfg, std::int64_t total_patches) {
  if (total_patches <= 0) {
    throw std::invalid_argument("resolve_budget: interval has no patches");
  }
  const bool has_count = cfg.budget >= 0;
  const bool has_ratio = cfg.budget_ratio >= 0.0;
  if (has_count == has_ratio) {
    throw std::invalid_argument(
        "schedule config: set exactly one of budget and budget_ratio");
  }
  std::int64_t budget = 0;
  if (has_count) {
    budget = cfg.budget;
  } else {
    if (!(cfg.budget_ratio <= 1.0)) {
      throw std::invalid_argument(
          "schedule config: budget_ratio must lie in [0, 1]");
    }
    budget = static_cast<std::int64_t>(std::floor(
        cfg.budget_ratio * static_cast<double>(total_patches)));
  }
  if (budget > total_patches) {
    throw std::invalid_argument(
        "schedule config: budget " + std::to_string(budget) +
        " exceeds the patch count " + std::to_string(total_patches));
  }
  return static_cast<int>(budget);
}

std::pair<AnchorSet, GreedyTrajectory> greedy_select(const ErrorDag& d,
                                                     const ScheduleCfg& cfg) {
  if (cfg.candidate_batch < 1) {
    throw std::invalid_argument("greedy_select: candidate_batch must be >= 1");
  }
  const std::int64_t total = d.total_patches();
  const int budget = resolve_budget(cfg, total);
  const std::size_t chunk = static_cast<std::size_t>(cfg.candidate_batch);

  AnchorSet cur(total);
  GreedyTrajectory traj;
  traj.steps.reserve(static_cast<std::size_t>(budget));
  std::vector<std::int64_t> candidates;
  candidates.reserve(static_cast<std::size_t>(total));
  std::vector<std::int64_t> chunk_ids;

  for (int step = 0; step < budget; ++step) {
    candidates.clear();
    for (std::int64_t id = 0; id < total; ++id) {
      if (!cur.test(id)) candidates.push_back(id);
    }
    double best_total = std::numeric_limits<double>::infinity();
    std::int64_t best_id = -1;
    for (std::size_t lo = 0; lo < candidates.size(); lo += chunk) {
      const std::size_t hi = std::min(lo + chunk, candidates.size());
      chunk_ids.assign(candidates.begin() + static_cast<std::ptrdiff_t>(lo),
                       candidates.begin() + static_cast<std::ptrdiff_t>(hi));
      const std::vector<double> totals =
          estimate_candidate_totals(d, cur, chunk_ids, cfg.threads);
      // Strict < keeps the smallest candidate id on ties, independent of
      // how candidates were chunked.
      for (std::size_t i = lo; i < hi; ++i) {
        if (totals[i - lo] < best_total) {
          best_total = totals[i - lo];
          best_id = candidates[i];
        }
      }
    }
    cur.set(best_id);
    traj.steps.push_back({static_cast<int>(best_id), best_total});
  }
  return {std::move(cur), std::move(traj)};
}

AnchorSet baseline_key_uniform(const Trace& t, const ScheduleCfg& cfg) {
  if (t.frames.empty()) {
    throw std::invalid_argument("baseline_key_uniform: trace has no frames");
  }
  const std::int64_t np = t.grid.num_patches();
  std::vector<std::uint8_t> keys(t.frames.size());
  for (std::size_t f = 0; f < t.frames.size(); ++f) {
    keys[f] = t.frames[f].is_keyframe ? 1 : 0;
  }
  AnchorSet out(static_cast<std::int64_t>(t.frames.size()) * np);
  for (const auto& [begin, end] : split_frames(keys, cfg.interval)) {
    const std::vector<std::uint8_t> sub(keys.begin() + begin,
                                        keys.begin() + end);
    const std::int64_t count = static_cast<std::int64_t>(end - begin) * np;
    const AnchorSet picked =
        key_uniform_interval(sub, np, resolve_budget(cfg, count));
    const std::int64_t offset = static_cast<std::int64_t>(begin) * np;
    for (std::int64_t i = 0; i < count; ++i) {
      if (picked.test(i)) out.set(offset + i);
    }
  }
  return out;
}

ErrorDag ablated_dag(const ErrorDag& d, AblationMode mode) {
  ErrorDag out = d;
  const std::int64_t np = d.num_patches_per_frame();
  if (mode == AblationMode::kNoTc) {
    for (auto& fr : out.frames) {
      fr.tc.values.assign(static_cast<std::size_t>(np), 1.0);
    }
    return out;
  }
  WeightMatrix ident;
  ident.rows = np;
  ident.cols = np;
  ident.row_ptr.resize(static_cast<std::size_t>(np) + 1);
  ident.col_idx.resize(static_cast<std::size_t>(np));
  ident.weight.assign(static_cast<std::size_t>(np), 1.0);
  for (std::int64_t i = 0; i <= np; ++i) {
    ident.row_ptr[static_cast<std::size_t>(i)] = i;
  }
  for (std::int64_t i = 0; i < np; ++i) {
    ident.col_idx[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(i);
  }
  for (std::size_t f = 0; f < out.frames.size(); ++f) {
    auto& fr = out.frames[f];
    fr.in_edges.clear();
    if (f > 0) {
      fr.in_edges.push_back(DagEdgeGroup{static_cast<int>(f) - 1, ident});
    }
  }
  return out;
}

std::vector<std::uint8_t> profile_encode(const AnchorSet& a,
                                         const PatchGrid& grid,
                                         int num_frames) {
  if (num_frames < 1) {
    throw std::invalid_argument("profile_encode: num_frames must be >= 1");
  }
  const std::int64_t bits =
      static_cast<std::int64_t>(num_frames) * grid.num_patches();
  if (a.size() != bits) {
    throw std::invalid_argument(
        "profile_encode: set holds " + std::to_string(a.size()) +
        " bits, grid wants " + std::to_string(bits));
  }
  return pack_bits(a);
}

AnchorSet profile_decode(const std::vector<std::uint8_t>& bytes,
                         const PatchGrid& grid, int num_frames) {
  if (num_frames < 1) {
    throw std::invalid_argument("profile_decode: num_frames must be >= 1");
  }
  return unpack_bits(
      bytes, static_cast<std::int64_t>(num_frames) * grid.num_patches());
}

void save_profile(const CacheProfile& p, const std::string& path) {
  if (p.num_frames < 1 || p.num_patch_rows < 1 || p.num_patch_cols < 1) {
    throw std::invalid_argument("save_profile: non-positive dimensions");
  }
  const std::int64_t bits = static_cast<std::int64_t>(p.num_frames) *
                            p.num_patch_rows * p.num_patch_cols;
  if (p.anchors.size() != bits) {
    throw std::invalid_argument(
        "save_profile: set holds " + std::to_string(p.anchors.size()) +
        " bits, header wants " + std::to_string(bits));
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.write(kProfileMagic, sizeof(kProfileMagic));
  os.put(static_cast<char>(kProfileVersion));
  write_u32(os, static_cast<std::uint32_t>(p.num_frames));
  write_u32(os, static_cast<std::uint32_t>(p.num_patch_rows));
  write_u32(os, static_cast<std::uint32_t>(p.num_patch_cols));
  const std::vector<std::uint8_t> packed = pack_bits(p.anchors);
  os.write(reinterpret_cast<const char*>(packed.data()),
           static_cast<std::streamsize>(packed.size()));
  if (!os) throw IoError("write failed: " + path);
}

CacheProfile load_profile(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path);
  char magic[4] = {0, 0, 0, 0};
  is.read(magic, sizeof(magic));
  if (!is || !std::equal(magic, magic + 4, kProfileMagic)) {
    throw FormatError("not a cache profile: " + path);
  }
  const int version = is.get();
  if (version != kProfileVersion) {
    throw FormatError("cache profile version " + std::to_string(version) +
                      " unsupported: " + path);
  }
  CacheProfile p;
  p.num_frames = static_cast<int>(read_u32(is));
  p.num_patch_rows = static_cast<int>(read_u32(is));
  p.num_patch_cols = static_cast<int>(read_u32(is));
  if (!is) throw FormatError("truncated cache profile header: " + path);
  for (const int dim : {p.num_frames, p.num_patch_rows, p.num_patch_cols}) {
    if (dim < 1 || static_cast<std::uint32_t>(dim) > kMaxProfileDim) {
      throw FormatError("cache profile dimension out of range: " + path);
    }
  }
  const std::int64_t bits = static_cast<std::int64_t>(p.num_frames) *
                            p.num_patch_rows * p.num_patch_cols;
  std::vector<std::uint8_t> packed(static_cast<std::size_t>((bits + 7) / 8));
  is.read(reinterpret_cast<char*>(packed.data()),
          static_cast<std::streamsize>(packed.size()));
  if (is.gcount() != static_cast<std::streamsize>(packed.size())) {
    throw FormatError("truncated cache profile payload: " + path);
  }
  if (is.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after cache profile payload: " + path);
  }
  p.anchors = unpack_bits(packed, bits);
  return p;
}

std::string profile_text(const CacheProfile& p) {
  const std::int64_t np =
      static_cast<std::int64_t>(p.num_patch_rows) * p.num_patch_cols;
  std::string out = "cache-profile frames=" + std::to_string(p.num_frames) +
                    " rows=" + std::to_string(p.num_patch_rows) +
                    " cols=" + std::to_string(p.num_patch_cols) +
                    " anchors=" + std::to_string(p.anchors.count()) + "\n";
  for (int f = 0; f < p.num_frames; ++f) {
    out += "frame " + std::to_string(f) + ":";
    for (int r = 0; r < p.num_patch_rows; ++r) {
      out += ' ';
      for (int c = 0; c < p.num_patch_cols; ++c) {
        const std::int64_t id = static_cast<std::int64_t>(f) * np +
                                static_cast<std::int64_t>(r) *
                                    p.num_patch_cols +
                                c;
        out += p.anchors.test(id) ? 'A' : '.';
      }
    }
    out += '\n';
  }
  return out;
}

std::vector<std::pair<int, int>> partition_intervals(const ErrorDag& d,
                                                     int interval) {
  if (d.frames.empty()) {
    throw std::invalid_argument("partition_intervals: empty DAG");
  }
  std::vector<std::uint8_t> keys(d.frames.size());
  for (std::size_t f = 0; f < d.frames.size(); ++f) {
    keys[f] = d.frames[f].is_keyframe ? 1 : 0;
  }
  return split_frames(keys, interval);
}

ScheduleResult schedule_dag(const ErrorDag& d, const ScheduleCfg& cfg,
                            ScheduleMethod method) {
  const std::int64_t np = d.num_patches_per_frame();
  ScheduleResult res;
  res.anchors = AnchorSet(d.total_patches());
  res.intervals = partition_intervals(d, cfg.interval);
  for (const auto& [begin, end] : res.intervals) {
    const std::int64_t offset = static_cast<std::int64_t>(begin) * np;
    const std::int64_t count = static_cast<std::int64_t>(end - begin) * np;
    if (method == ScheduleMethod::kPerFrame) {
      for (std::int64_t i = 0; i < count; ++i) res.anchors.set(offset + i);
      continue;
    }
    const ErrorDag sub = extract_interval(d, begin, end);
    AnchorSet picked;
    if (method == ScheduleMethod::kKeyUniform) {
      std::vector<std::uint8_t> keys(sub.frames.size());
      for (std::size_t f = 0; f < sub.frames.size(); ++f) {
        keys[f] = sub.frames[f].is_keyframe ? 1 : 0;
      }
      picked = key_uniform_interval(keys, np, resolve_budget(cfg, count));
    } else {
      const ErrorDag* target = &sub;
      ErrorDag ablated;
      if (method == ScheduleMethod::kNoWeight) {
        ablated = ablated_dag(sub, AblationMode::kNoWeight);
        target = &ablated;
      } else if (method == ScheduleMethod::kNoTc) {
        ablated = ablated_dag(sub, AblationMode::kNoTc);
        target = &ablated;
      }
      auto [anchors, traj] = greedy_select(*target, cfg);
      picked = std::move(anchors);
      res.trajectories.push_back(std::move(traj));
    }
    for (std::int64_t i = 0; i < count; ++i) {
      if (picked.test(i)) res.anchors.set(offset + i);
    }
  }
  return res;
}

}  // namespace srsched
