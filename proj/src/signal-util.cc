// antispoof/src/signal-util.cc

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

#include "antispoof/signal-util.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace antispoof {

bool IsPowerOfTwo(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

size_t NextPowerOfTwo(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void Fft(std::span<std::complex<double>> data, bool inverse) {
  const size_t n = data.size();
  if (!IsPowerOfTwo(n)) throw std::invalid_argument("Fft: size not a power of two");
  // Bit-reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  for (size_t len = 2; len <= n; len <<= 1) {
    const size_t half = len / 2;
    // Twiddles computed directly per index; the recurrence w *= w_len drifts
    // by O(len * eps) which shows up in the symmetry tests at large nfft.
    for (size_t k = 0; k < half; ++k) {
      const double ang = sign * 2.0 * std::numbers::pi * k / len;
      const std::complex<double> w(std::cos(ang), std::sin(ang));
      for (size_t i = k; i < n; i += len) {
        std::complex<double> u = data[i];
        std::complex<double> v = data[i + half] * w;
        data[i] = u + v;
        data[i + half] = u - v;
      }
    }
  }
  if (inverse) {
    for (auto &z : data) z /= static_cast<double>(n);
  }
}

std::vector<double> PowerSpectrumFull(std::span<const double> x, size_t nfft) {
  if (x.size() > nfft) throw std::invalid_argument("PowerSpectrumFull: input longer than nfft");
  std::vector<std::complex<double>> buf(nfft);
  for (size_t i = 0; i < x.size(); ++i) buf[i] = x[i];
  Fft(buf);
  std::vector<double> p(nfft);
  for (size_t k = 0; k < nfft; ++k) p[k] = std::norm(buf[k]);
  return p;
}

std::vector<double> HannWindow(size_t n) {
  std::vector<double> w(n);
  for (size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  return w;
}

double BesselI0(double x) {
  // Power series; converges quickly for the beta values used here (< 20).
  double sum = 1.0, term = 1.0;
  const double q = x * x / 4.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

double KaiserAt(double x, double half, double beta) {
  if (std::abs(x) > half) return 0.0;
  const double r = x / half;
  return BesselI0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) /
         BesselI0(beta);
}

double KaiserBeta(double a) {
  if (a > 50.0) return 0.1102 * (a - 8.7);
  if (a >= 21.0) return 0.5842 * std::pow(a - 21.0, 0.4) + 0.07886 * (a - 21.0);
  return 0.0;
}

double Sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace antispoof
