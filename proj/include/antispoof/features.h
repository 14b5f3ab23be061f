// antispoof/include/antispoof/features.h

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

#ifndef ANTISPOOF_FEATURES_H_
#define ANTISPOOF_FEATURES_H_

#include <cstdint>
#include <string>

#include "antispoof/audio-io.h"
#include "antispoof/matrix.h"

namespace antispoof {

/// Power values are clamped here before taking the log.
inline constexpr double kLogFloor = 1e-12;

enum class FeatureKind : uint32_t {
  kLogSpecOneSided = 1,
  kLogSpecDoubleSided = 2,
  kLfccStack = 3,
};

std::string FeatureKindName(FeatureKind kind);
/// Accepts "logspec_onesided", "logspec_doublesided", "lfcc" / "lfcc_stack".
FeatureKind ParseFeatureKind(const std::string &name);

/// Frequency-by-time feature matrix: values(f, t).
struct FeatureMatrix {
  Matrix values;
  FeatureKind kind = FeatureKind::kLogSpecOneSided;
  int sample_rate = 16000;

  size_t FreqDim() const { return values.NumRows(); }
  size_t TimeDim() const { return values.NumCols(); }
};

struct StftConfig {
  double frame_length = 0.025;  // seconds
  double hop = 0.010;           // seconds
  size_t nfft = 0;              // 0: derive from frame length (DeriveNfft)
};

/// Least power of two >= frame_length * sample_rate.
size_t DeriveNfft(double frame_length, int sample_rate);

/// Samples per frame / hop as used by the analysis (rounded to nearest).
size_t FrameSamples(double seconds, int sample_rate);

/// 1 + floor((len - frame) / hop) when len >= frame, else 0.
size_t NumFrames(size_t len, size_t frame, size_t hop);

/// Hann-windowed |STFT|^2.  Returns [nfft x frames] when full_spectrum,
/// otherwise the one-sided [nfft/2+1 x frames], in natural bin order.
/// Throws std::invalid_argument if the buffer is shorter than one frame.
Matrix StftPower(const AudioBuffer &buf, const StftConfig &cfg,
                 bool full_spectrum = false);

/// log(max(|STFT|^2, kLogFloor)).  The double-sided layout holds all nfft
/// bins with DC at row nfft/2: row r carries bin (r - nfft/2) mod nfft, so
/// rows nfft/2 +/- k mirror each other for real input.
FeatureMatrix LogSpec(const AudioBuffer &buf, const StftConfig &cfg,
                      bool double_sided);

struct LfccConfig {
  double window = 0.020;   // seconds
  double overlap = 0.010;  // seconds; hop = window - overlap
  int n_filters = 40;
  int n_coeffs = 20;
  double pre_emphasis = 0.97;
  int target_frames = 450;   // <= 0 keeps the natural frame count
  int delta_window = 2;      // frames per side
};

/// Regression deltas along time (columns) with edge-replicated frames:
/// d_t = sum_n n (c_{t+n} - c_{t-n}) / (2 sum_n n^2).
Matrix Deltas(const Matrix &m, int window);

/// Static LFCCs only, [n_coeffs x frames], before deltas and time shaping.
Matrix LfccStatics(const AudioBuffer &buf, const LfccConfig &cfg);

/// Full LFCC stack [3 n_coeffs x target_frames]: statics, deltas and
/// delta-deltas, time axis forced to target_frames by tiling (short) or a
/// seeded random slice (long).
FeatureMatrix Lfcc(const AudioBuffer &buf, const LfccConfig &cfg,
                   uint64_t seed = 0);

/// Repeats columns (out[:, t] = in[:, t mod T]) or slices a seeded random
/// window to reach exactly `target` columns.
Matrix FixFrames(const Matrix &m, size_t target, uint64_t seed);

/// Width in Hz of the band holding the central `fraction` of the power of a
/// Hann-windowed periodogram, (1 - fraction)/2 excluded from each tail.
/// Throws DataError for an all-zero buffer.
double OccupiedBandwidth(const AudioBuffer &buf, double fraction = 0.99);

enum class BandClass { kNarrowband, kWideband };

/// Narrowband iff bw <= threshold.
BandClass RouteByBandwidth(double bw, double threshold = 4000.0);

}  // namespace antispoof

#endif  // ANTISPOOF_FEATURES_H_
