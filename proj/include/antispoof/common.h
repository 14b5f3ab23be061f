// antispoof/include/antispoof/common.h

// Copyright 2026  The antispoof Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ANTISPOOF_COMMON_H_
#define ANTISPOOF_COMMON_H_

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace antispoof {

// Error categories.  The CLI maps these onto exit codes: UsageError -> 1,
// DataError -> 2, ToolError -> 3.  Violated preconditions on library calls
// throw std::invalid_argument.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ToolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic random source.  Only the engine comes from <random>; the
/// distributions are written out here because the standard library's
/// distributions are implementation-defined, and outputs must be identical
/// across toolchains for a given seed.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double Uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }

  /// Uniform integer on the closed range [lo, hi].
  int64_t UniformInt(int64_t lo, int64_t hi);

  bool Bernoulli(double p) { return Uniform01() < p; }

  /// Standard normal (Box-Muller, no caching so the stream position is
  /// always two draws per call).
  double Gaussian();

 private:
  std::mt19937_64 engine_;
};

/// 64-bit FNV-1a over the bytes of `data`, continuing from `h`.
uint64_t Fnv1a64(std::string_view data,
                 uint64_t h = 0xcbf29ce484222325ULL);

/// splitmix64 finalizer.
uint64_t Mix64(uint64_t x);

/// Derives a per-item seed from a master seed and a list of labels
/// (e.g. utt_id, recipe_id).  Adding items never changes other items' seeds.
uint64_t DeriveSeed(uint64_t master, std::initializer_list<std::string_view> labels);

/// Lower-case hex rendering of a 64-bit value (16 characters).
std::string HexU64(uint64_t v);

/// Splits on runs of ASCII whitespace.
std::vector<std::string> SplitWhitespace(std::string_view line);

std::string Trim(std::string_view s);

/// Writes "WARNING (antispoof): <msg>" to stderr.  Thread-safe.
void LogWarning(const std::string &msg);
/// Suppresses LogWarning output (tests).
void SetWarningsEnabled(bool enabled);

}  // namespace antispoof

#endif  // ANTISPOOF_COMMON_H_
