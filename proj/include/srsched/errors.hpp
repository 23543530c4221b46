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

#ifndef SRSCHED_ERRORS_HPP_
#define SRSCHED_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace srsched {

// Error taxonomy. API misuse (bad argument values, mismatched dimensions
// passed by the caller) throws std::invalid_argument directly.

// Filesystem failures: missing file, short read, write failure.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed serialized data: bad magic, unsupported version, truncated or
// inconsistent header.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Well-formed data that violates a semantic invariant (out-of-range block,
// dangling reference, weight row out of bounds).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace srsched

#endif  // SRSCHED_ERRORS_HPP_
