// antispoof/include/antispoof/signal-util.h

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

#ifndef ANTISPOOF_SIGNAL_UTIL_H_
#define ANTISPOOF_SIGNAL_UTIL_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace antispoof {

bool IsPowerOfTwo(size_t n);

/// Smallest power of two >= n (n >= 1).
size_t NextPowerOfTwo(size_t n);

/// In-place iterative radix-2 FFT.  data.size() must be a power of two.
void Fft(std::span<std::complex<double>> data, bool inverse = false);

/// |DFT|^2 of a real sequence zero-padded to nfft, all nfft bins.
std::vector<double> PowerSpectrumFull(std::span<const double> x, size_t nfft);

/// Periodic ("DFT-even") Hann window: 0.5 - 0.5 cos(2 pi n / N).
std::vector<double> HannWindow(size_t n);

/// Zeroth-order modified Bessel function of the first kind.
double BesselI0(double x);

/// Kaiser window evaluated at offset x from the centre, half-width `half`.
/// Zero for |x| > half.
double KaiserAt(double x, double half, double beta);

/// Kaiser beta for a given stop-band attenuation in dB.
double KaiserBeta(double attenuation_db);

/// Normalized sinc, sin(pi x) / (pi x).
double Sinc(double x);

}  // namespace antispoof

#endif  // ANTISPOOF_SIGNAL_UTIL_H_
