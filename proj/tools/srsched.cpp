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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "srsched/complexity.hpp"
#include "srsched/dag.hpp"
#include "srsched/errors.hpp"
#include "srsched/estimator.hpp"
#include "srsched/parallel.hpp"
#include "srsched/pixels.hpp"
#include "srsched/reuse_sim.hpp"
#include "srsched/scheduler.hpp"
#include "srsched/toy_codec.hpp"
#include "srsched/trace.hpp"

namespace {

namespace sr = srsched;

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitFormat = 4;
constexpr int kExitValidation = 5;

// ---------------------------------------------------------------------------
// Video container: uniform-dimension frame sequence of little-endian doubles.
// Layout: magic "SRVIDEO\n", u8 version, u32 LE count / width / height, then
// count frames of width*height doubles, row-major.
// ---------------------------------------------------------------------------

constexpr char kVideoMagic[8] = {'S', 'R', 'V', 'I', 'D', 'E', 'O', '\n'};
constexpr std::uint8_t kVideoVersion = 1;
constexpr std::int64_t kVideoHeaderBytes = 8 + 1 + 12;
constexpr std::uint32_t kMaxVideoDim = 1u << 20;
constexpr std::uint32_t kMaxVideoFrames = 1u << 20;

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

class VideoWriter {
 public:
  VideoWriter(const std::string& path, int count, int width, int height)
      : path_(path),
        count_(count),
        width_(width),
        height_(height),
        os_(path, std::ios::binary | std::ios::trunc) {
    if (count < 1 || width < 1 || height < 1) {
      throw std::invalid_argument("video writer: non-positive dimensions");
    }
    if (!os_) throw sr::IoError("cannot open for writing: " + path);
    os_.write(kVideoMagic, sizeof(kVideoMagic));
    os_.put(static_cast<char>(kVideoVersion));
    write_u32(os_, static_cast<std::uint32_t>(count));
    write_u32(os_, static_cast<std::uint32_t>(width));
    write_u32(os_, static_cast<std::uint32_t>(height));
  }

  void append(const sr::Plane& p) {
    if (p.width != width_ || p.height != height_) {
      throw std::invalid_argument("video writer: frame dimensions changed");
    }
    if (written_ == count_) {
      throw std::logic_error("video writer: more frames than declared");
    }
    os_.write(reinterpret_cast<const char*>(p.data.data()),
              static_cast<std::streamsize>(p.size() * sizeof(double)));
    ++written_;
  }

  void finish() {
    if (written_ != count_) {
      throw std::logic_error("video writer: fewer frames than declared");
    }
    os_.flush();
    if (!os_) throw sr::IoError("write failed: " + path_);
  }

 private:
  std::string path_;
  int count_ = 0;
  int width_ = 0;
  int height_ = 0;
  int written_ = 0;
  std::ofstream os_;
};

class VideoReader {
 public:
  explicit VideoReader(const std::string& path)
      : path_(path), is_(path, std::ios::binary) {
    if (!is_) throw sr::IoError("cannot open for reading: " + path);
    char magic[8] = {0};
    is_.read(magic, sizeof(magic));
    if (!is_ || !std::equal(magic, magic + sizeof(magic), kVideoMagic)) {
      throw sr::FormatError("not a video container: " + path);
    }
    const int version = is_.get();
    if (version != kVideoVersion) {
      throw sr::FormatError("video version " + std::to_string(version) +
                            " unsupported: " + path);
    }
    const std::uint32_t count = read_u32(is_);
    const std::uint32_t width = read_u32(is_);
    const std::uint32_t height = read_u32(is_);
    if (!is_) throw sr::FormatError("truncated video header: " + path);
    if (count < 1 || count > kMaxVideoFrames || width < 1 ||
        width > kMaxVideoDim || height < 1 || height > kMaxVideoDim) {
      throw sr::FormatError("video dimensions out of range: " + path);
    }
    count_ = static_cast<int>(count);
    width_ = static_cast<int>(width);
    height_ = static_cast<int>(height);
    frame_bytes_ = static_cast<std::int64_t>(width_) * height_ *
                   static_cast<std::int64_t>(sizeof(double));
    is_.seekg(0, std::ios::end);
    const std::int64_t total = static_cast<std::int64_t>(is_.tellg());
    if (total != kVideoHeaderBytes + count_ * frame_bytes_) {
      throw sr::FormatError("video payload size mismatch: " + path);
    }
  }

  int count() const { return count_; }
  int width() const { return width_; }
  int height() const { return height_; }

  sr::Plane read_frame(int f) {
    if (f < 0 || f >= count_) {
      throw std::invalid_argument("video frame index out of range");
    }
    sr::Plane p(width_, height_);
    is_.clear();
    is_.seekg(kVideoHeaderBytes + static_cast<std::int64_t>(f) * frame_bytes_);
    is_.read(reinterpret_cast<char*>(p.data.data()),
             static_cast<std::streamsize>(frame_bytes_));
    if (!is_) throw sr::IoError("read failed: " + path_);
    return p;
  }

  std::vector<sr::Plane> read_all() {
    std::vector<sr::Plane> frames;
    frames.reserve(static_cast<std::size_t>(count_));
    for (int f = 0; f < count_; ++f) frames.push_back(read_frame(f));
    return frames;
  }

 private:
  std::string path_;
  std::ifstream is_;
  int count_ = 0;
  int width_ = 0;
  int height_ = 0;
  std::int64_t frame_bytes_ = 0;
};

// ---------------------------------------------------------------------------
// Small output helpers.
// ---------------------------------------------------------------------------

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

std::string fmt(double v, int precision = 6) {
  if (std::isnan(v)) return "na";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

std::string fmt_full(double v) { return fmt(v, 17); }

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw sr::IoError("cannot open for writing: " + path);
  return os;
}

void close_out(std::ofstream& os, const std::string& path) {
  os.flush();
  if (!os) throw sr::IoError("write failed: " + path);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthArgs {
  sr::SynthParams params;
  int scale = 4;
  std::string out_hr;
  std::string out_lr;
};

void run_synth(const SynthArgs& a) {
  if (a.out_hr.empty() && a.out_lr.empty()) {
    throw std::invalid_argument("synth: give --out-hr and/or --out-lr");
  }
  if (a.params.num_frames < 1) {
    throw std::invalid_argument("synth: --frames must be >= 1");
  }
  if (!a.out_lr.empty()) {
    if (a.scale < 1) throw std::invalid_argument("synth: --scale must be >= 1");
    if (a.params.width % a.scale != 0 || a.params.height % a.scale != 0) {
      throw std::invalid_argument(
          "synth: --width and --height must be divisible by --scale");
    }
  }
  std::optional<VideoWriter> hr_out;
  std::optional<VideoWriter> lr_out;
  if (!a.out_hr.empty()) {
    hr_out.emplace(a.out_hr, a.params.num_frames, a.params.width,
                   a.params.height);
  }
  if (!a.out_lr.empty()) {
    lr_out.emplace(a.out_lr, a.params.num_frames, a.params.width / a.scale,
                   a.params.height / a.scale);
  }
  for (int f = 0; f < a.params.num_frames; ++f) {
    const sr::Plane hr = sr::synth_frame(a.params, f);
    if (hr_out) hr_out->append(hr);
    if (lr_out) lr_out->append(sr::bilinear_resample(hr, 1.0 / a.scale));
  }
  std::cout << "synth: frames=" << a.params.num_frames << " hr="
            << a.params.width << "x" << a.params.height;
  if (!a.out_lr.empty()) {
    std::cout << " lr=" << a.params.width / a.scale << "x"
              << a.params.height / a.scale;
  }
  std::cout << " seed=" << a.params.seed << "\n";
  if (hr_out) {
    hr_out->finish();
    std::cout << "wrote " << a.out_hr << "\n";
  }
  if (lr_out) {
    lr_out->finish();
    std::cout << "wrote " << a.out_lr << "\n";
  }
}

// ---------------------------------------------------------------------------
// encode
// ---------------------------------------------------------------------------

struct EncodeArgs {
  std::string in_lr;
  std::string out_trace;
  sr::EncoderCfg cfg;
};

void run_encode(const EncodeArgs& a) {
  VideoReader reader(a.in_lr);
  const std::vector<sr::Plane> lr = reader.read_all();
  const sr::Trace t = sr::encode(lr, a.cfg);
  sr::save_trace(t, a.out_trace);
  std::int64_t intra = 0;
  std::int64_t inter = 0;
  int keyframes = 0;
  for (const sr::FrameRecord& fr : t.frames) {
    if (fr.is_keyframe) ++keyframes;
    for (const sr::BlockRecord& b : fr.blocks) {
      (b.mode == sr::BlockMode::kIntra ? intra : inter) += 1;
    }
  }
  std::cout << "encode: frames=" << t.frames.size()
            << " keyframes=" << keyframes << " blocks=" << (intra + inter)
            << " intra=" << intra << " inter=" << inter << "\n";
  std::cout << "wrote " << a.out_trace << "\n";
}

// ---------------------------------------------------------------------------
// dag
// ---------------------------------------------------------------------------

struct DagArgs {
  std::string in_trace;
  std::string out_dag;
  std::string dot;
  std::string degrees_csv;
};

void run_dag(const DagArgs& a) {
  const sr::Trace t = sr::load_trace(a.in_trace);
  const std::vector<sr::TcVector> tc = sr::compute_tc(t);
  const sr::ErrorDag d = sr::build_dag(t, tc);
  const sr::DagReport report = sr::validate_dag(d);
  if (!report.all_pass()) {
    std::string failed;
    for (const sr::DagCheck& c : report.checks) {
      if (!c.pass) failed += (failed.empty() ? "" : ", ") + c.name;
    }
    throw sr::ValidationError("dag checks failed: " + failed);
  }
  sr::save_dag(d, a.out_dag);
  if (!a.dot.empty()) sr::dump_dot(d, a.dot);
  if (!a.degrees_csv.empty()) {
    const sr::DegreeReport deg = sr::degree_of_reference(t);
    std::ofstream os = open_out(a.degrees_csv);
    os << "kind,index,degree\n";
    for (std::size_t i = 0; i < deg.frame_degree.size(); ++i) {
      os << "frame," << i << "," << fmt_full(deg.frame_degree[i]) << "\n";
    }
    for (std::size_t i = 0; i < deg.intra_block_degrees.size(); ++i) {
      os << "intra-block," << i << ","
         << fmt_full(deg.intra_block_degrees[i]) << "\n";
    }
    for (std::size_t i = 0; i < deg.inter_block_degrees.size(); ++i) {
      os << "inter-block," << i << ","
         << fmt_full(deg.inter_block_degrees[i]) << "\n";
    }
    close_out(os, a.degrees_csv);
  }
  std::int64_t edges = 0;
  for (const sr::DagFrame& fr : d.frames) {
    for (const sr::DagEdgeGroup& g : fr.in_edges) edges += g.weights.nnz();
  }
  std::cout << "dag: frames=" << d.frames.size()
            << " patches-per-frame=" << d.num_patches_per_frame()
            << " edges=" << edges << " checks=ok\n";
  std::cout << "wrote " << a.out_dag << "\n";
}

// ---------------------------------------------------------------------------
// schedule
// ---------------------------------------------------------------------------

struct ScheduleArgs {
  std::string in_dag;
  std::string out_profile;
  std::string trajectory_csv;
  std::string text_path;
  std::string method = "greedy";
  int budget = -1;
  double budget_ratio = -1.0;
  int candidate_batch = 1024;
  int interval = 0;
  int threads = 0;
};

sr::ScheduleMethod parse_method(const std::string& name) {
  if (name == "greedy") return sr::ScheduleMethod::kGreedy;
  if (name == "key-uniform") return sr::ScheduleMethod::kKeyUniform;
  if (name == "no-weight") return sr::ScheduleMethod::kNoWeight;
  if (name == "no-tc") return sr::ScheduleMethod::kNoTc;
  if (name == "per-frame") return sr::ScheduleMethod::kPerFrame;
  throw std::invalid_argument("unknown method: " + name);
}

void run_schedule(const ScheduleArgs& a) {
  const sr::ErrorDag d = sr::load_dag(a.in_dag);
  sr::ScheduleCfg cfg{.budget = a.budget,
                      .budget_ratio = a.budget_ratio,
                      .candidate_batch = a.candidate_batch,
                      .interval = a.interval,
                      .threads = sr::resolve_threads(a.threads)};
  if (cfg.budget < 0 && !(cfg.budget_ratio >= 0.0)) cfg.budget_ratio = 0.05;
  const sr::ScheduleResult res = sr::schedule_dag(d, cfg, parse_method(a.method));
  const sr::CacheProfile profile{static_cast<int>(d.frames.size()),
                                 d.grid.num_rows(), d.grid.num_cols(),
                                 res.anchors};
  sr::save_profile(profile, a.out_profile);
  if (!a.trajectory_csv.empty()) {
    std::ofstream os = open_out(a.trajectory_csv);
    os << "interval,step,patch,total_error\n";
    for (std::size_t i = 0; i < res.trajectories.size(); ++i) {
      const auto& steps = res.trajectories[i].steps;
      for (std::size_t s = 0; s < steps.size(); ++s) {
        os << i << "," << s << "," << steps[s].patch_id << ","
           << fmt_full(steps[s].total_error) << "\n";
      }
    }
    close_out(os, a.trajectory_csv);
  }
  if (!a.text_path.empty()) {
    std::ofstream os = open_out(a.text_path);
    os << sr::profile_text(profile);
    close_out(os, a.text_path);
  }
  std::cout << "schedule: method=" << a.method
            << " anchors=" << res.anchors.count() << " total="
            << d.total_patches() << " intervals=" << res.intervals.size()
            << "\n";
  std::cout << "wrote " << a.out_profile << "\n";
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string in_trace;
  std::string profile;
  std::string hr;
  std::string per_patch_csv;
  double anchor_noise = 0.0;
  std::uint64_t noise_seed = 0;
};

void check_profile_matches(const sr::CacheProfile& p, const sr::Trace& t) {
  if (p.num_frames != static_cast<int>(t.frames.size()) ||
      p.num_patch_rows != t.grid.num_rows() ||
      p.num_patch_cols != t.grid.num_cols()) {
    throw std::invalid_argument(
        "profile geometry " + std::to_string(p.num_frames) + "x" +
        std::to_string(p.num_patch_rows) + "x" +
        std::to_string(p.num_patch_cols) + " does not match the trace");
  }
}

void run_simulate(const SimulateArgs& a) {
  const sr::Trace t = sr::load_trace(a.in_trace);
  const sr::CacheProfile profile = sr::load_profile(a.profile);
  check_profile_matches(profile, t);
  VideoReader hr(a.hr);
  if (hr.count() != static_cast<int>(t.frames.size())) {
    throw std::invalid_argument(
        "simulate: " + std::to_string(hr.count()) +
        " ground-truth frames for a " + std::to_string(t.frames.size()) +
        "-frame trace");
  }
  const sr::SimCfg cfg{a.anchor_noise, a.noise_seed};
  const sr::SimReport report = sr::simulate(
      t, profile.anchors, [&hr](int f) { return hr.read_frame(f); }, cfg);
  std::cout << "simulate: frames=" << t.frames.size()
            << " patches-per-frame=" << t.grid.num_patches()
            << " anchors=" << profile.anchors.count()
            << " anchor-pixel-fraction=" << fmt(report.anchor_pixel_fraction)
            << "\n";
  std::cout << "sequence-psnr=" << fmt(report.sequence_psnr)
            << " total-squared-error=" << fmt_full(report.total_squared_error)
            << "\n";
  for (std::size_t f = 0; f < report.frame_psnr.size(); ++f) {
    double se = 0.0;
    for (const double e : report.frame_patch_errors[f]) se += e;
    std::cout << "frame " << f << ": psnr=" << fmt(report.frame_psnr[f])
              << " squared-error=" << fmt_full(se) << "\n";
  }
  if (!a.per_patch_csv.empty()) {
    std::ofstream os = open_out(a.per_patch_csv);
    os << "frame,patch,squared_error\n";
    for (std::size_t f = 0; f < report.frame_patch_errors.size(); ++f) {
      const auto& row = report.frame_patch_errors[f];
      for (std::size_t p = 0; p < row.size(); ++p) {
        os << f << "," << p << "," << fmt_full(row[p]) << "\n";
      }
    }
    close_out(os, a.per_patch_csv);
  }
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string in_trace;
  std::string in_dag;
  std::string profile;
  std::string hr;
  std::string out_csv;
};

void run_eval(const EvalArgs& a) {
  const sr::Trace t = sr::load_trace(a.in_trace);
  const sr::ErrorDag d = sr::load_dag(a.in_dag);
  if (!(d.grid == t.grid) || d.frames.size() != t.frames.size()) {
    throw std::invalid_argument("eval: trace and DAG disagree on geometry");
  }
  const sr::CacheProfile profile = sr::load_profile(a.profile);
  check_profile_matches(profile, t);
  VideoReader hr(a.hr);
  if (hr.count() != static_cast<int>(t.frames.size())) {
    throw std::invalid_argument(
        "eval: " + std::to_string(hr.count()) + " ground-truth frames for a " +
        std::to_string(t.frames.size()) + "-frame trace");
  }
  const sr::ErrorEstimate est = sr::estimate_sequential(d, profile.anchors);
  const sr::SimReport report = sr::simulate(
      t, profile.anchors, [&hr](int f) { return hr.read_frame(f); });
  std::ofstream os = open_out(a.out_csv);
  os << "frame,patch,estimated,measured\n";
  for (std::size_t f = 0; f < est.frame_errors.size(); ++f) {
    for (std::size_t p = 0; p < est.frame_errors[f].size(); ++p) {
      os << f << "," << p << "," << fmt_full(est.frame_errors[f][p]) << ","
         << fmt_full(report.frame_patch_errors[f][p]) << "\n";
    }
  }
  close_out(os, a.out_csv);
  const sr::CompareStats stats = sr::compare(est, report);
  std::cout << "eval: n=" << stats.count
            << " spearman=" << fmt(stats.spearman_rho) << "\n";
  std::cout << "wrote " << a.out_csv << "\n";
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string in_dag;
  std::string out_csv;
  int budget = -1;
  double budget_ratio = -1.0;
  int candidate_batch = 1024;
  int reps = 5;
  int threads = 0;
};

// Reference loop: one candidate at a time through the plain per-set
// estimator. This is the unbatched cost baseline the other modes are
// measured against.
sr::AnchorSet greedy_vanilla(const sr::ErrorDag& d, int budget) {
  const std::int64_t total = d.total_patches();
  sr::AnchorSet cur(total);
  for (int step = 0; step < budget; ++step) {
    double best = std::numeric_limits<double>::infinity();
    std::int64_t best_id = -1;
    for (std::int64_t id = 0; id < total; ++id) {
      if (cur.test(id)) continue;
      cur.set(id);
      const double tot = sr::estimate_sequential(d, cur).total;
      cur.set(id, false);
      if (tot < best) {
        best = tot;
        best_id = id;
      }
    }
    cur.set(best_id);
  }
  return cur;
}

void run_bench(const BenchArgs& a) {
  if (a.reps < 1) throw std::invalid_argument("bench: --reps must be >= 1");
  const sr::ErrorDag d = sr::load_dag(a.in_dag);
  sr::ScheduleCfg cfg{.budget = a.budget,
                      .budget_ratio = a.budget_ratio,
                      .candidate_batch = a.candidate_batch,
                      .interval = 0,
                      .threads = sr::resolve_threads(a.threads)};
  if (cfg.budget < 0 && !(cfg.budget_ratio >= 0.0)) cfg.budget_ratio = 0.05;
  const int budget = sr::resolve_budget(cfg, d.total_patches());
  sr::ScheduleCfg cfg_single = cfg;
  cfg_single.candidate_batch = 1;

  const char* kModes[3] = {"vanilla", "batch-1", "batched"};
  std::vector<double> seconds[3];
  std::optional<sr::AnchorSet> reference;
  for (int rep = 0; rep < a.reps; ++rep) {
    for (int mode = 0; mode < 3; ++mode) {
      const auto start = std::chrono::steady_clock::now();
      sr::AnchorSet got;
      switch (mode) {
        case 0:
          got = greedy_vanilla(d, budget);
          break;
        case 1:
          got = sr::greedy_select(d, cfg_single).first;
          break;
        default:
          got = sr::greedy_select(d, cfg).first;
          break;
      }
      const std::chrono::duration<double> dt =
          std::chrono::steady_clock::now() - start;
      seconds[mode].push_back(dt.count());
      if (!reference) {
        reference = std::move(got);
      } else if (!(got == *reference)) {
        throw std::runtime_error(
            "bench: anchor sets diverged between modes; the estimators are "
            "not equivalent");
      }
    }
  }

  if (!a.out_csv.empty()) {
    std::ofstream os = open_out(a.out_csv);
    os << "mode,rep,seconds\n";
    for (int mode = 0; mode < 3; ++mode) {
      for (int rep = 0; rep < a.reps; ++rep) {
        os << kModes[mode] << "," << rep << ","
           << fmt(seconds[mode][static_cast<std::size_t>(rep)], 9) << "\n";
      }
    }
    close_out(os, a.out_csv);
  }

  const double med[3] = {median(seconds[0]), median(seconds[1]),
                         median(seconds[2])};
  std::cout << "bench: patches=" << d.total_patches() << " budget=" << budget
            << " reps=" << a.reps << " threads=" << cfg.threads << "\n";
  for (int mode = 0; mode < 3; ++mode) {
    std::cout << "bench: mode=" << kModes[mode]
              << " median-seconds=" << fmt(med[mode], 9) << "\n";
  }
  std::cout << "bench: speedup batch-1-vs-vanilla=" << fmt(med[0] / med[1], 4)
            << " batched-vs-vanilla=" << fmt(med[0] / med[2], 4) << "\n";
  std::cout << "bench: anchor-sets=identical\n";
}

// ---------------------------------------------------------------------------
// Wiring.
// ---------------------------------------------------------------------------

void add_config(CLI::App* sub) {
  sub->set_config("--config", "", "Read option defaults from a TOML/INI file");
  sub->allow_config_extras(false);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Patch-level anchor scheduling for reuse-based super-resolution "
      "streaming"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "0.1.0");

  auto synth_args = std::make_shared<SynthArgs>();
  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a synthetic ground-truth video and/or its "
               "downscaled twin");
  add_config(synth);
  synth->add_option("--width", synth_args->params.width,
                    "ground-truth width in pixels")
      ->capture_default_str();
  synth->add_option("--height", synth_args->params.height,
                    "ground-truth height in pixels")
      ->capture_default_str();
  synth->add_option("--frames", synth_args->params.num_frames, "frame count")
      ->capture_default_str();
  synth->add_option("--seed", synth_args->params.seed, "content seed")
      ->capture_default_str();
  synth->add_option("--pan-x", synth_args->params.pan_x,
                    "background velocity, pixels per frame")
      ->capture_default_str();
  synth->add_option("--pan-y", synth_args->params.pan_y,
                    "background velocity, pixels per frame")
      ->capture_default_str();
  synth->add_option("--num-rects", synth_args->params.num_rects,
                    "moving rectangle count")
      ->capture_default_str();
  synth->add_option("--noise-amp", synth_args->params.noise_amp,
                    "per-pixel noise amplitude")
      ->capture_default_str();
  synth->add_option("--scale", synth_args->scale,
                    "downscale factor for --out-lr")
      ->capture_default_str();
  synth->add_option("--out-hr", synth_args->out_hr,
                    "output path for the ground-truth video");
  synth->add_option("--out-lr", synth_args->out_lr,
                    "output path for the downscaled video");
  synth->callback([synth_args] { run_synth(*synth_args); });

  auto encode_args = std::make_shared<EncodeArgs>();
  CLI::App* encode = app.add_subcommand(
      "encode", "Encode a low-resolution video into a reference trace");
  add_config(encode);
  encode->add_option("--in-lr", encode_args->in_lr, "input video")
      ->required();
  encode->add_option("--out-trace", encode_args->out_trace, "output trace")
      ->required();
  encode->add_option("--block-size", encode_args->cfg.block_size,
                     "motion block size in pixels")
      ->capture_default_str();
  encode->add_option("--search-range", encode_args->cfg.search_range,
                     "motion search radius in pixels")
      ->capture_default_str();
  encode->add_option("--max-refs", encode_args->cfg.max_refs,
                     "reference frames kept")
      ->capture_default_str();
  encode->add_option("--gop", encode_args->cfg.gop, "keyframe period")
      ->capture_default_str();
  encode->add_option("--intra-threshold", encode_args->cfg.intra_threshold,
                     "max mean absolute difference per pixel for inter blocks")
      ->capture_default_str();
  encode->add_option("--patch-w", encode_args->cfg.patch_w,
                     "patch width stamped into the trace")
      ->capture_default_str();
  encode->add_option("--patch-h", encode_args->cfg.patch_h,
                     "patch height stamped into the trace")
      ->capture_default_str();
  encode->add_option("--scale", encode_args->cfg.scale,
                     "upscale factor stamped into the trace")
      ->capture_default_str();
  encode->callback([encode_args] { run_encode(*encode_args); });

  auto dag_args = std::make_shared<DagArgs>();
  CLI::App* dag = app.add_subcommand(
      "dag", "Build the patch error DAG from a trace");
  add_config(dag);
  dag->add_option("--in-trace", dag_args->in_trace, "input trace")
      ->required();
  dag->add_option("--out-dag", dag_args->out_dag, "output DAG")->required();
  dag->add_option("--dot", dag_args->dot, "also write a DOT rendering");
  dag->add_option("--degrees", dag_args->degrees_csv,
                  "also write per-frame/per-block reference degrees as CSV");
  dag->callback([dag_args] { run_dag(*dag_args); });

  auto schedule_args = std::make_shared<ScheduleArgs>();
  CLI::App* schedule = app.add_subcommand(
      "schedule", "Select anchor patches and write a cache profile");
  add_config(schedule);
  schedule->add_option("--in-dag", schedule_args->in_dag, "input DAG")
      ->required();
  schedule->add_option("--out-profile", schedule_args->out_profile,
                       "output cache profile")
      ->required();
  schedule
      ->add_option("--method", schedule_args->method, "selection method")
      ->check(CLI::IsMember(
          {"greedy", "key-uniform", "no-weight", "no-tc", "per-frame"}))
      ->capture_default_str();
  schedule->add_option("--budget", schedule_args->budget,
                       "anchor count per interval");
  schedule->add_option("--budget-ratio", schedule_args->budget_ratio,
                       "anchor fraction per interval in [0,1] "
                       "(0.05 when neither budget option is given)");
  schedule->add_option("--candidate-batch", schedule_args->candidate_batch,
                       "candidate sets per batched evaluation")
      ->capture_default_str();
  schedule->add_option("--interval", schedule_args->interval,
                       "frames per scheduling interval; 0 = split at "
                       "keyframes")
      ->capture_default_str();
  schedule->add_option("--threads", schedule_args->threads,
                       "worker threads; 0 = SRSCHED_THREADS or logical cores")
      ->capture_default_str();
  schedule->add_option("--trajectory", schedule_args->trajectory_csv,
                       "also write the greedy pick sequence as CSV");
  schedule->add_option("--text", schedule_args->text_path,
                       "also write a human-readable profile rendering");
  schedule->callback([schedule_args] { run_schedule(*schedule_args); });

  auto simulate_args = std::make_shared<SimulateArgs>();
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Measure true upscaling error under a cache profile");
  add_config(simulate);
  simulate->add_option("--in-trace", simulate_args->in_trace, "input trace")
      ->required();
  simulate->add_option("--profile", simulate_args->profile, "cache profile")
      ->required();
  simulate->add_option("--hr", simulate_args->hr, "ground-truth video")
      ->required();
  simulate->add_option("--per-patch", simulate_args->per_patch_csv,
                       "also write per-patch squared errors as CSV");
  simulate->add_option("--anchor-noise", simulate_args->anchor_noise,
                       "uniform noise amplitude added to anchor pixels")
      ->capture_default_str();
  simulate->add_option("--noise-seed", simulate_args->noise_seed,
                       "seed for --anchor-noise")
      ->capture_default_str();
  simulate->callback([simulate_args] { run_simulate(*simulate_args); });

  auto eval_args = std::make_shared<EvalArgs>();
  CLI::App* eval = app.add_subcommand(
      "eval", "Compare estimated and measured per-patch errors");
  add_config(eval);
  eval->add_option("--in-trace", eval_args->in_trace, "input trace")
      ->required();
  eval->add_option("--in-dag", eval_args->in_dag, "input DAG")->required();
  eval->add_option("--profile", eval_args->profile, "cache profile")
      ->required();
  eval->add_option("--hr", eval_args->hr, "ground-truth video")->required();
  eval->add_option("--out-csv", eval_args->out_csv,
                   "output CSV: frame,patch,estimated,measured")
      ->required();
  eval->callback([eval_args] { run_eval(*eval_args); });

  auto bench_args = std::make_shared<BenchArgs>();
  CLI::App* bench = app.add_subcommand(
      "bench", "Time greedy selection under the three estimation modes");
  add_config(bench);
  bench->add_option("--in-dag", bench_args->in_dag, "input DAG")->required();
  bench->add_option("--budget", bench_args->budget,
                    "anchor count (default: 5% of patches)");
  bench->add_option("--budget-ratio", bench_args->budget_ratio,
                    "anchor fraction in [0,1]");
  bench->add_option("--candidate-batch", bench_args->candidate_batch,
                    "candidate sets per batched evaluation")
      ->capture_default_str();
  bench->add_option("--reps", bench_args->reps, "repetitions per mode")
      ->capture_default_str();
  bench->add_option("--threads", bench_args->threads,
                    "worker threads; 0 = SRSCHED_THREADS or logical cores")
      ->capture_default_str();
  bench->add_option("--out-csv", bench_args->out_csv,
                    "per-run timings as CSV: mode,rep,seconds");
  bench->callback([bench_args] { run_bench(*bench_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return kExitUsage;
  } catch (const sr::IoError& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return kExitIo;
  } catch (const sr::FormatError& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return kExitFormat;
  } catch (const sr::ValidationError& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << one_line(e.what()) << "\n";
    return kExitInternal;
  }
  return kExitOk;
}
