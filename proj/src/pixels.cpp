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

#include "srsched/pixels.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "srsched/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "serialized formats assume a little-endian host");
static_assert(sizeof(double) == 8 && std::numeric_limits<double>::is_iec559,
              "serialized formats assume IEEE 754 binary64");

namespace srsched {

namespace {

// Validates before the data vector allocates, so bad dimensions surface as
// invalid_argument rather than an allocation failure.
std::size_t checked_plane_size(int w, int h) {
  if (w <= 0 || h <= 0) {
    throw std::invalid_argument("Plane dimensions must be positive");
  }
  return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
}

}  // namespace

Plane::Plane(int w, int h, double fill)
    : width(w), height(h), data(checked_plane_size(w, h), fill) {}

namespace {

// Per-axis sample mapping: source coordinate of output index i is
// (i + 0.5) / factor - 0.5, clamped. t == 0 at both borders so border
// samples are exact copies.
struct AxisTap {
  int lo;
  int hi;
  double t;
};

// `inv` is the per-axis sample step (source pixels per output pixel).
std::vector<AxisTap> make_taps(int out_n, int in_n, double inv) {
  std::vector<AxisTap> taps(static_cast<std::size_t>(out_n));
  for (int i = 0; i < out_n; ++i) {
    const double u = (i + 0.5) * inv - 0.5;
    AxisTap tap;
    if (u <= 0.0 || in_n == 1) {
      tap = {0, 0, 0.0};
    } else if (u >= static_cast<double>(in_n - 1)) {
      tap = {in_n - 1, in_n - 1, 0.0};
    } else {
      const int lo = static_cast<int>(u);
      tap = {lo, lo + 1, u - lo};
    }
    taps[static_cast<std::size_t>(i)] = tap;
  }
  return taps;
}

int scaled_dim(int dim, double factor) {
  const long long out = std::llround(static_cast<double>(dim) * factor);
  return out < 1 ? 1 : static_cast<int>(out);
}

Plane resample_with_steps(const Plane& src, int out_w, int out_h,
                          double inv_x, double inv_y) {
  Plane out(out_w, out_h);
  const std::vector<AxisTap> xt = make_taps(out_w, src.width, inv_x);
  const std::vector<AxisTap> yt = make_taps(out_h, src.height, inv_y);
  for (int y = 0; y < out_h; ++y) {
    const AxisTap& ty = yt[static_cast<std::size_t>(y)];
    const double* r0 = src.row(ty.lo);
    const double* r1 = src.row(ty.hi);
    double* dst = out.row(y);
    if (ty.t == 0.0) {
      for (int x = 0; x < out_w; ++x) {
        const AxisTap& tx = xt[static_cast<std::size_t>(x)];
        dst[x] = lerp(r0[tx.lo], r0[tx.hi], tx.t);
      }
    } else {
      for (int x = 0; x < out_w; ++x) {
        const AxisTap& tx = xt[static_cast<std::size_t>(x)];
        const double top = lerp(r0[tx.lo], r0[tx.hi], tx.t);
        const double bot = lerp(r1[tx.lo], r1[tx.hi], tx.t);
        dst[x] = lerp(top, bot, ty.t);
      }
    }
  }
  return out;
}

}  // namespace

Plane bilinear_resample(const Plane& src, double factor) {
  if (!(factor > 0.0)) {
    throw std::invalid_argument("resample factor must be > 0");
  }
  if (src.width <= 0 || src.height <= 0) {
    throw std::invalid_argument("resample source is empty");
  }
  const double inv = 1.0 / factor;
  return resample_with_steps(src, scaled_dim(src.width, factor),
                             scaled_dim(src.height, factor), inv, inv);
}

Plane bilinear_resample_to(const Plane& src, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) {
    throw std::invalid_argument("resample target dimensions must be positive");
  }
  if (src.width <= 0 || src.height <= 0) {
    throw std::invalid_argument("resample source is empty");
  }
  return resample_with_steps(
      src, out_w, out_h, static_cast<double>(src.width) / out_w,
      static_cast<double>(src.height) / out_h);
}

double squared_error_sum(const Plane& a, const Plane& b) {
  if (a.width != b.width || a.height != b.height) {
    throw std::invalid_argument("squared_error_sum: dimension mismatch");
  }
  double acc = 0.0;
  const double* pa = a.data.data();
  const double* pb = b.data.data();
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = pa[i] - pb[i];
    acc += d * d;
  }
  return acc;
}

double mse(const Plane& a, const Plane& b) {
  return squared_error_sum(a, b) / static_cast<double>(a.size());
}

double psnr_from_mse(double mse_value) {
  if (mse_value < 0.0) {
    throw std::invalid_argument("psnr: negative mse");
  }
  if (mse_value == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse_value);
}

double psnr(const Plane& a, const Plane& b) { return psnr_from_mse(mse(a, b)); }

bool bit_equal(const Plane& a, const Plane& b) {
  if (a.width != b.width || a.height != b.height) return false;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::bit_cast<std::uint64_t>(a.data[i]) !=
        std::bit_cast<std::uint64_t>(b.data[i])) {
      return false;
    }
  }
  return true;
}

Plane crop(const Plane& src, const Rect& rect) {
  if (!rect.inside(src.width, src.height)) {
    throw std::invalid_argument("crop: rect outside plane");
  }
  Plane out(rect.w, rect.h);
  for (int y = 0; y < rect.h; ++y) {
    std::memcpy(out.row(y), src.row(rect.y + y) + rect.x,
                static_cast<std::size_t>(rect.w) * sizeof(double));
  }
  return out;
}

void paste(Plane& dst, const Plane& src, int x, int y) {
  if (!Rect{x, y, src.width, src.height}.inside(dst.width, dst.height)) {
    throw std::invalid_argument("paste: source outside destination");
  }
  for (int r = 0; r < src.height; ++r) {
    std::memcpy(dst.row(y + r) + x, src.row(r),
                static_cast<std::size_t>(src.width) * sizeof(double));
  }
}

namespace {

constexpr char kPlaneMagic[8] = {'S', 'R', 'P', 'L', 'A', 'N', 'E', '\n'};

}  // namespace

void save_plane(const Plane& p, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for write: " + path);
  f.write(kPlaneMagic, sizeof(kPlaneMagic));
  const std::uint32_t w = static_cast<std::uint32_t>(p.width);
  const std::uint32_t h = static_cast<std::uint32_t>(p.height);
  f.write(reinterpret_cast<const char*>(&w), sizeof(w));
  f.write(reinterpret_cast<const char*>(&h), sizeof(h));
  f.write(reinterpret_cast<const char*>(p.data.data()),
          static_cast<std::streamsize>(p.size() * sizeof(double)));
  if (!f) throw IoError("write failed: " + path);
}

Plane load_plane(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path);
  char magic[8];
  f.read(magic, sizeof(magic));
  if (!f || std::memcmp(magic, kPlaneMagic, sizeof(kPlaneMagic)) != 0) {
    throw FormatError("not a plane file: " + path);
  }
  std::uint32_t w = 0;
  std::uint32_t h = 0;
  f.read(reinterpret_cast<char*>(&w), sizeof(w));
  f.read(reinterpret_cast<char*>(&h), sizeof(h));
  if (!f || w == 0 || h == 0 || w > (1u << 24) || h > (1u << 24)) {
    throw FormatError("bad plane header: " + path);
  }
  Plane p(static_cast<int>(w), static_cast<int>(h));
  f.read(reinterpret_cast<char*>(p.data.data()),
         static_cast<std::streamsize>(p.size() * sizeof(double)));
  if (!f) throw FormatError("truncated plane payload: " + path);
  return p;
}

void save_pgm(const Plane& p, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for write: " + path);
  f << "P5\n" << p.width << " " << p.height << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(p.width));
  for (int y = 0; y < p.height; ++y) {
    const double* src = p.row(y);
    for (int x = 0; x < p.width; ++x) {
      const long long v = std::llround(src[x]);
      row[static_cast<std::size_t>(x)] =
          static_cast<unsigned char>(v < 0 ? 0 : (v > 255 ? 255 : v));
    }
    f.write(reinterpret_cast<const char*>(row.data()),
            static_cast<std::streamsize>(row.size()));
  }
  if (!f) throw IoError("write failed: " + path);
}

PlaneF32 to_f32(const Plane& p) {
  PlaneF32 out;
  out.width = p.width;
  out.height = p.height;
  out.data.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    out.data[i] = static_cast<float>(p.data[i]);
  }
  return out;
}

Plane to_f64(const PlaneF32& p) {
  Plane out(p.width, p.height);
  for (std::size_t i = 0; i < p.data.size(); ++i) {
    out.data[i] = static_cast<double>(p.data[i]);
  }
  return out;
}

}  // namespace srsched
