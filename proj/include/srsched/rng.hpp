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

#ifndef SRSCHED_RNG_HPP_
#define SRSCHED_RNG_HPP_

#include <cstdint>

namespace srsched {

// splitmix64: tiny, statistically solid, and identical on every platform.
// Standard-library engines are avoided for anything that feeds stored
// artifacts because libstdc++ does not pin distribution implementations.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Stateless mix of up to four values into one well-scrambled word. Used for
// coordinate-addressed noise where any (seed, tag, x, y) must be computable
// without sequential state.
inline std::uint64_t hash_mix(std::uint64_t a, std::uint64_t b = 0,
                              std::uint64_t c = 0, std::uint64_t d = 0) {
  std::uint64_t s = a;
  std::uint64_t h = splitmix64(s);
  s ^= b + 0x9e3779b97f4a7c15ull;
  h ^= splitmix64(s);
  s ^= c + 0xc2b2ae3d27d4eb4full;
  h ^= splitmix64(s);
  s ^= d + 0x165667b19e3779f9ull;
  h ^= splitmix64(s);
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0, n). Modulo bias is below 2^-40 for any n < 2^24, which
  // covers every use here.
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  std::int64_t next_int(std::int64_t lo, std::int64_t hi_inclusive) {
    return lo + static_cast<std::int64_t>(
                    next_below(static_cast<std::uint64_t>(hi_inclusive - lo + 1)));
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double next_double(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

 private:
  std::uint64_t state_;
};

// Coordinate-addressed uniform double in [0, 1).
inline double hash01(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0,
                     std::uint64_t d = 0) {
  return static_cast<double>(hash_mix(a, b, c, d) >> 11) * 0x1.0p-53;
}

}  // namespace srsched

#endif  // SRSCHED_RNG_HPP_
