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

#ifndef SRSCHED_PIXELS_HPP_
#define SRSCHED_PIXELS_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace srsched {

// Single-channel image, row-major doubles. Values are nominally [0, 255]
// luma but nothing clamps; intermediate planes (residuals) go negative.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  Plane() = default;
  Plane(int w, int h, double fill = 0.0);

  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  const double* row(int y) const {
    return data.data() + static_cast<std::size_t>(y) * width;
  }
  double* row(int y) {
    return data.data() + static_cast<std::size_t>(y) * width;
  }
  std::size_t size() const { return data.size(); }
};

struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  std::int64_t area() const {
    return static_cast<std::int64_t>(w) * h;
  }
  bool inside(int frame_w, int frame_h) const {
    return x >= 0 && y >= 0 && w > 0 && h > 0 && x + w <= frame_w &&
           y + h <= frame_h;
  }
  bool operator==(const Rect&) const = default;
};

// Linear interpolation with an exact t == 0 shortcut so resampling at
// factor 1 reproduces the input bit for bit.
inline double lerp(double a, double b, double t) {
  if (t == 0.0) return a;
  return a + t * (b - a);
}

// Bilinear resampling with pixel-center alignment: output sample i maps to
// source coordinate (i + 0.5) / factor - 0.5, clamped to the valid range.
// The four neighbors blend x first, then y. Output dimensions are
// max(1, llround(dim * factor)). factor must be > 0; factor 1 is the
// identity, and a constant plane stays exactly constant at any factor.
Plane bilinear_resample(const Plane& src, double factor);

// Same kernel with explicit output dimensions; the per-axis sample step is
// in_dim / out_dim. For targets reachable by a uniform factor (both axes,
// exact quotients) the result is bit-identical to bilinear_resample.
Plane bilinear_resample_to(const Plane& src, int out_w, int out_h);

// Sum of squared differences, accumulated in row-major order. Planes must
// have identical dimensions. Zero iff the planes are numerically equal.
double squared_error_sum(const Plane& a, const Plane& b);

double mse(const Plane& a, const Plane& b);

// Peak signal-to-noise ratio against peak 255; +infinity when mse is 0.
double psnr_from_mse(double mse_value);
double psnr(const Plane& a, const Plane& b);

// True when the planes match bit for bit (distinguishes -0.0 from 0.0 and
// compares NaN payloads, unlike operator== on the values).
bool bit_equal(const Plane& a, const Plane& b);

// rect must lie inside src.
Plane crop(const Plane& src, const Rect& rect);

// src must fit inside dst at (x, y).
void paste(Plane& dst, const Plane& src, int x, int y);

// Lossless raw container: magic "SRPLANE\n", u32 LE width, u32 LE height,
// then width*height little-endian doubles, row-major.
void save_plane(const Plane& p, const std::string& path);
Plane load_plane(const std::string& path);

// 8-bit binary PGM (P5); values are rounded to nearest and clamped.
void save_pgm(const Plane& p, const std::string& path);

// float32 copy of a plane. Exact for values carrying at most 24 significant
// bits (synthetic content is quantized to 1/256, so its frames round-trip
// losslessly); used to keep large frame caches inside memory limits.
struct PlaneF32 {
  int width = 0;
  int height = 0;
  std::vector<float> data;
};

PlaneF32 to_f32(const Plane& p);
Plane to_f64(const PlaneF32& p);

}  // namespace srsched

#endif  // SRSCHED_PIXELS_HPP_
