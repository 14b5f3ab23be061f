// antispoof/src/common.cc

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

#include "antispoof/common.h"

#include <atomic>
#include <cctype>
#include <cmath>
#include <iostream>
#include <mutex>
#include <numbers>

namespace antispoof {

int64_t Rng::UniformInt(int64_t lo, int64_t hi) {
  if (hi < lo) throw std::invalid_argument("Rng::UniformInt: empty range");
  const uint64_t span = static_cast<uint64_t>(hi - lo);
  if (span == ~0ULL) return lo + static_cast<int64_t>(engine_());
  const uint64_t n = span + 1;
  // Reject the 2^64 mod n lowest values so x % n is exactly uniform.
  const uint64_t threshold = (0 - n) % n;
  uint64_t x;
  do {
    x = engine_();
  } while (x < threshold);
  return lo + static_cast<int64_t>(x % n);
}

double Rng::Gaussian() {
  double u1 = Uniform01();
  double u2 = Uniform01();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

uint64_t Fnv1a64(std::string_view data, uint64_t h) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t DeriveSeed(uint64_t master,
                    std::initializer_list<std::string_view> labels) {
  uint64_t h = Fnv1a64({});
  for (std::string_view label : labels) {
    h = Fnv1a64(label, h);
    h = Fnv1a64(std::string_view("\x1f", 1), h);  // unit separator
  }
  return Mix64(master ^ Mix64(h));
}

std::string HexU64(uint64_t v) {
  static const char *digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

std::vector<std::string> SplitWhitespace(std::string_view line) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string Trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

namespace {
std::mutex g_log_mutex;
std::atomic<bool> g_warnings_enabled{true};
}  // namespace

void LogWarning(const std::string &msg) {
  if (!g_warnings_enabled.load()) return;
  std::lock_guard<std::mutex> lock(g_log_mutex);
  std::cerr << "WARNING (antispoof): " << msg << std::endl;
}

void SetWarningsEnabled(bool enabled) { g_warnings_enabled.store(enabled); }

}  // namespace antispoof
