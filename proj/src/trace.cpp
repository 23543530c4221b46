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

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "srsched/errors.hpp"

namespace srsched {

namespace {

using nlohmann::json;

std::string frame_tag(int frame) {
  return "frame " + std::to_string(frame);
}

std::string block_tag(int frame, int block) {
  return frame_tag(frame) + " block " + std::to_string(block);
}

Rect intersect(const Rect& a, const Rect& b) {
  const int x0 = std::max(a.x, b.x);
  const int y0 = std::max(a.y, b.y);
  const int x1 = std::min(a.x + a.w, b.x + b.w);
  const int y1 = std::min(a.y + a.h, b.y + b.h);
  if (x1 <= x0 || y1 <= y0) return Rect{0, 0, 0, 0};
  return Rect{x0, y0, x1 - x0, y1 - y0};
}

}  // namespace

Rect PatchGrid::patch_rect(int row, int col) const {
  const int nr = num_rows();
  const int nc = num_cols();
  if (row < 0 || row >= nr || col < 0 || col >= nc) {
    throw std::invalid_argument("patch_rect: patch coordinates out of range");
  }
  Rect r;
  r.x = col * patch_w;
  r.y = row * patch_h;
  r.w = (col == nc - 1) ? frame_w - r.x : patch_w;
  r.h = (row == nr - 1) ? frame_h - r.y : patch_h;
  return r;
}

void validate_grid(const PatchGrid& g) {
  if (g.frame_w <= 0 || g.frame_h <= 0) {
    throw std::invalid_argument("grid: frame dimensions must be positive");
  }
  if (g.patch_w <= 0 || g.patch_h <= 0) {
    throw std::invalid_argument("grid: patch dimensions must be positive");
  }
  if (g.patch_w > g.frame_w || g.patch_h > g.frame_h) {
    throw std::invalid_argument("grid: patch larger than frame");
  }
}

Rect clamped_source(const Rect& rect, int dx, int dy, int frame_w,
                    int frame_h) {
  Rect s = rect;
  s.x = std::clamp(rect.x + dx, 0, frame_w - rect.w);
  s.y = std::clamp(rect.y + dy, 0, frame_h - rect.h);
  return s;
}

void validate_trace(const Trace& t) {
  try {
    validate_grid(t.grid);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  if (t.scale < 1) throw ValidationError("scale must be >= 1");

  const int fw = t.grid.frame_w;
  const int fh = t.grid.frame_h;
  std::vector<std::uint8_t> cover(static_cast<std::size_t>(fw) * fh);

  for (std::size_t fi = 0; fi < t.frames.size(); ++fi) {
    const FrameRecord& fr = t.frames[fi];
    const int index = static_cast<int>(fi);
    if (fr.frame_index != index) {
      throw ValidationError(frame_tag(index) + ": indices must be contiguous");
    }
    if (fr.ref_frames.size() > 3) {
      throw ValidationError(frame_tag(index) + ": more than 3 references");
    }
    for (std::size_t a = 0; a < fr.ref_frames.size(); ++a) {
      const int ref = fr.ref_frames[a];
      if (ref < 0 || ref >= index) {
        throw ValidationError(frame_tag(index) +
                              ": acyclicity violated (reference " +
                              std::to_string(ref) + ")");
      }
      for (std::size_t b = a + 1; b < fr.ref_frames.size(); ++b) {
        if (fr.ref_frames[b] == ref) {
          throw ValidationError(frame_tag(index) + ": duplicate reference");
        }
      }
    }
    if (fr.is_keyframe && !fr.ref_frames.empty()) {
      throw ValidationError(frame_tag(index) + ": keyframe with references");
    }

    std::fill(cover.begin(), cover.end(), std::uint8_t{0});
    for (std::size_t bi = 0; bi < fr.blocks.size(); ++bi) {
      const BlockRecord& b = fr.blocks[bi];
      const std::string tag = block_tag(index, static_cast<int>(bi));
      if (!b.rect.inside(fw, fh)) {
        throw ValidationError(tag + ": rect outside frame");
      }
      if (b.payload.width != b.rect.w || b.payload.height != b.rect.h) {
        throw ValidationError(tag + ": payload dimensions mismatch");
      }
      if (b.mode == BlockMode::kInter) {
        if (fr.is_keyframe) {
          throw ValidationError(tag + ": inter block in keyframe");
        }
        if (b.ref_slot < 0 ||
            b.ref_slot >= static_cast<int>(fr.ref_frames.size())) {
          throw ValidationError(tag + ": ref_slot out of range");
        }
      }
      for (int y = 0; y < b.rect.h; ++y) {
        std::uint8_t* row =
            cover.data() + static_cast<std::size_t>(b.rect.y + y) * fw + b.rect.x;
        for (int x = 0; x < b.rect.w; ++x) {
          if (row[x]) {
            throw ValidationError(tag + ": overlaps another block");
          }
          row[x] = 1;
        }
      }
    }
    for (std::size_t i = 0; i < cover.size(); ++i) {
      if (!cover[i]) {
        throw ValidationError(frame_tag(index) + ": blocks do not cover pixel (" +
                              std::to_string(i % fw) + "," +
                              std::to_string(i / fw) + ")");
      }
    }
  }
}

namespace {

constexpr char kTraceMagic[8] = {'S', 'R', 'T', 'R', 'A', 'C', 'E', '\n'};
constexpr std::uint8_t kTraceVersion = 1;

}  // namespace

void save_trace(const Trace& t, const std::string& path) {
  validate_trace(t);

  std::uint64_t payload_count = 0;
  json frames = json::array();
  for (const FrameRecord& fr : t.frames) {
    json blocks = json::array();
    for (const BlockRecord& b : fr.blocks) {
      json rec = json::array({b.rect.x, b.rect.y, b.rect.w, b.rect.h,
                              b.mode == BlockMode::kInter ? 1 : 0,
                              payload_count});
      if (b.mode == BlockMode::kInter) {
        rec.push_back(b.ref_slot);
        rec.push_back(b.dx);
        rec.push_back(b.dy);
      }
      blocks.push_back(std::move(rec));
      payload_count += b.payload.size();
    }
    frames.push_back({{"index", fr.frame_index},
                      {"key", fr.is_keyframe},
                      {"refs", fr.ref_frames},
                      {"blocks", std::move(blocks)}});
  }
  const json header = {{"grid",
                        {{"frame_w", t.grid.frame_w},
                         {"frame_h", t.grid.frame_h},
                         {"patch_w", t.grid.patch_w},
                         {"patch_h", t.grid.patch_h}}},
                       {"scale", t.scale},
                       {"payload_count", payload_count},
                       {"frames", std::move(frames)}};
  const std::string header_text = header.dump();

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for write: " + path);
  f.write(kTraceMagic, sizeof(kTraceMagic));
  f.put(static_cast<char>(kTraceVersion));
  const std::uint64_t header_len = header_text.size();
  f.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
  f.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  for (const FrameRecord& fr : t.frames) {
    for (const BlockRecord& b : fr.blocks) {
      f.write(reinterpret_cast<const char*>(b.payload.data.data()),
              static_cast<std::streamsize>(b.payload.size() * sizeof(double)));
    }
  }
  if (!f) throw IoError("write failed: " + path);
}

Trace load_trace(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);

  char magic[8];
  f.read(magic, sizeof(magic));
  if (!f || std::memcmp(magic, kTraceMagic, sizeof(kTraceMagic)) != 0) {
    throw FormatError("not a trace file: " + path);
  }
  const int version = f.get();
  if (version != kTraceVersion) {
    throw FormatError("unsupported trace version " + std::to_string(version));
  }
  std::uint64_t header_len = 0;
  f.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  if (!f || header_len > (1ull << 32)) {
    throw FormatError("bad trace header length");
  }
  std::string header_text(header_len, '\0');
  f.read(header_text.data(), static_cast<std::streamsize>(header_len));
  if (!f) throw FormatError("truncated trace header");

  json header;
  try {
    header = json::parse(header_text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("trace header is not valid JSON: ") +
                      e.what());
  }

  Trace t;
  std::uint64_t payload_count = 0;
  std::vector<std::pair<BlockRecord*, std::uint64_t>> payload_slots;
  try {
    t.grid.frame_w = header.at("grid").at("frame_w").get<int>();
    t.grid.frame_h = header.at("grid").at("frame_h").get<int>();
    t.grid.patch_w = header.at("grid").at("patch_w").get<int>();
    t.grid.patch_h = header.at("grid").at("patch_h").get<int>();
    t.scale = header.at("scale").get<int>();
    payload_count = header.at("payload_count").get<std::uint64_t>();
    t.frames.resize(header.at("frames").size());
    std::size_t fi = 0;
    for (const json& jf : header.at("frames")) {
      FrameRecord& fr = t.frames[fi++];
      fr.frame_index = jf.at("index").get<int>();
      fr.is_keyframe = jf.at("key").get<bool>();
      fr.ref_frames = jf.at("refs").get<std::vector<int>>();
      fr.blocks.resize(jf.at("blocks").size());
      std::size_t bi = 0;
      for (const json& jb : jf.at("blocks")) {
        BlockRecord& b = fr.blocks[bi++];
        if (!jb.is_array() || jb.size() < 6) {
          throw FormatError(block_tag(fr.frame_index, static_cast<int>(bi) - 1) +
                            ": malformed block record");
        }
        b.rect = Rect{jb[0].get<int>(), jb[1].get<int>(), jb[2].get<int>(),
                      jb[3].get<int>()};
        const int mode = jb[4].get<int>();
        const std::uint64_t off = jb[5].get<std::uint64_t>();
        if (mode == 1) {
          if (jb.size() != 9) {
            throw FormatError(
                block_tag(fr.frame_index, static_cast<int>(bi) - 1) +
                ": inter block record needs 9 fields");
          }
          b.mode = BlockMode::kInter;
          b.ref_slot = jb[6].get<int>();
          b.dx = jb[7].get<int>();
          b.dy = jb[8].get<int>();
        } else if (mode == 0) {
          b.mode = BlockMode::kIntra;
        } else {
          throw FormatError(block_tag(fr.frame_index, static_cast<int>(bi) - 1) +
                            ": unknown block mode");
        }
        if (b.rect.w <= 0 || b.rect.h <= 0) {
          throw FormatError(block_tag(fr.frame_index, static_cast<int>(bi) - 1) +
                            ": non-positive block dimensions");
        }
        const std::uint64_t count = b.rect.area();
        if (off + count > payload_count) {
          throw FormatError(block_tag(fr.frame_index, static_cast<int>(bi) - 1) +
                            ": payload offset out of range");
        }
        b.payload = Plane(b.rect.w, b.rect.h);
        payload_slots.emplace_back(&b, off);
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("trace header field error: ") + e.what());
  }

  // Payload slots are written in offset order by save_trace, but offsets are
  // honored as recorded so a reordered-yet-consistent file still loads.
  for (auto& [block, off] : payload_slots) {
    f.seekg(static_cast<std::streamoff>(sizeof(kTraceMagic) + 1 +
                                        sizeof(std::uint64_t) + header_len +
                                        off * sizeof(double)));
    f.read(reinterpret_cast<char*>(block->payload.data.data()),
           static_cast<std::streamsize>(block->payload.size() * sizeof(double)));
    if (!f) throw FormatError("truncated trace payload: " + path);
  }

  validate_trace(t);
  return t;
}

bool traces_bit_equal(const Trace& a, const Trace& b) {
  if (a.grid != b.grid || a.scale != b.scale ||
      a.frames.size() != b.frames.size()) {
    return false;
  }
  for (std::size_t fi = 0; fi < a.frames.size(); ++fi) {
    const FrameRecord& fa = a.frames[fi];
    const FrameRecord& fb = b.frames[fi];
    if (fa.frame_index != fb.frame_index || fa.is_keyframe != fb.is_keyframe ||
        fa.ref_frames != fb.ref_frames ||
        fa.blocks.size() != fb.blocks.size()) {
      return false;
    }
    for (std::size_t bi = 0; bi < fa.blocks.size(); ++bi) {
      const BlockRecord& ba = fa.blocks[bi];
      const BlockRecord& bb = fb.blocks[bi];
      if (ba.rect != bb.rect || ba.mode != bb.mode ||
          ba.ref_slot != bb.ref_slot || ba.dx != bb.dx || ba.dy != bb.dy ||
          !bit_equal(ba.payload, bb.payload)) {
        return false;
      }
    }
  }
  return true;
}

std::vector<std::vector<SubBlock>> split_blocks(const Trace& t) {
  validate_trace(t);
  const PatchGrid& g = t.grid;
  std::vector<std::vector<SubBlock>> out(t.frames.size());

  for (std::size_t fi = 0; fi < t.frames.size(); ++fi) {
    const FrameRecord& fr = t.frames[fi];
    std::vector<SubBlock>& subs = out[fi];
    for (std::size_t bi = 0; bi < fr.blocks.size(); ++bi) {
      const BlockRecord& b = fr.blocks[bi];
      Rect src;
      int ref_frame = -1;
      if (b.mode == BlockMode::kInter) {
        src = clamped_source(b.rect, b.dx, b.dy, g.frame_w, g.frame_h);
        ref_frame = fr.ref_frames[static_cast<std::size_t>(b.ref_slot)];
      }
      const int r0 = g.row_at(b.rect.y);
      const int r1 = g.row_at(b.rect.y + b.rect.h - 1);
      const int c0 = g.col_at(b.rect.x);
      const int c1 = g.col_at(b.rect.x + b.rect.w - 1);
      for (int pr = r0; pr <= r1; ++pr) {
        for (int pc = c0; pc <= c1; ++pc) {
          const Rect cut = intersect(b.rect, g.patch_rect(pr, pc));
          if (cut.w == 0) continue;
          SubBlock sb;
          sb.block_id = static_cast<int>(bi);
          sb.patch_id = g.patch_index(pr, pc);
          sb.rect = cut;
          sb.mode = b.mode;
          if (b.mode == BlockMode::kInter) {
            sb.ref_frame = ref_frame;
            sb.source = Rect{src.x + (cut.x - b.rect.x),
                             src.y + (cut.y - b.rect.y), cut.w, cut.h};
            const int sr0 = g.row_at(sb.source.y);
            const int sr1 = g.row_at(sb.source.y + sb.source.h - 1);
            const int sc0 = g.col_at(sb.source.x);
            const int sc1 = g.col_at(sb.source.x + sb.source.w - 1);
            for (int qr = sr0; qr <= sr1; ++qr) {
              for (int qc = sc0; qc <= sc1; ++qc) {
                const Rect piece = intersect(sb.source, g.patch_rect(qr, qc));
                if (piece.w == 0) continue;
                sb.refs.push_back(
                    RefContribution{g.patch_index(qr, qc), piece.area()});
              }
            }
          }
          subs.push_back(std::move(sb));
        }
      }
    }
  }
  return out;
}

}  // namespace srsched
