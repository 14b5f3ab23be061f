// antispoof/include/antispoof/audio-io.h

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

#ifndef ANTISPOOF_AUDIO_IO_H_
#define ANTISPOOF_AUDIO_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace antispoof {

/// Mono PCM audio.  Samples are nominally in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 16000;
  std::string source_id;

  size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double DurationSeconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

/// Quantizes one sample to 16-bit PCM: x * 32768 rounded to nearest with
/// ties away from zero, then clamped to [-32768, 32767].
int16_t QuantizeSample(double x);

/// Reads a PCM 16-bit mono WAV.  Samples are divided by 32768.  Unknown RIFF
/// chunks (LIST, fact, ...) are skipped.  Throws DataError for unreadable
/// files, non-PCM encodings, other bit depths and multichannel input.
AudioBuffer ReadWav(const std::filesystem::path &path);

/// Writes a canonical 44-byte-header PCM 16-bit mono WAV.
void WriteWav(const AudioBuffer &buf, const std::filesystem::path &path);

/// Encodes into an in-memory WAV byte image (same layout as WriteWav).
std::vector<uint8_t> EncodeWav(const AudioBuffer &buf);
AudioBuffer DecodeWav(std::span<const uint8_t> bytes,
                      const std::string &source_id = "");

struct ResampleOptions {
  /// Low-pass cutoff as a fraction of the Nyquist frequency of the lower of
  /// the two rates.
  double cutoff_fraction = 0.9;
  /// Sinc zero crossings kept on each side of the kernel centre.
  int num_zeros = 32;
  double kaiser_beta = 8.6;
};

/// Windowed-sinc polyphase resampler (Kaiser window).  Output length is
/// round(len * target_rate / sample_rate).  Identity when the rates match.
AudioBuffer Resample(const AudioBuffer &buf, int target_rate,
                     const ResampleOptions &opts = {});

double Rms(std::span<const double> x);

/// Gain that brings the RMS of `buf` to `target_dbfs` (20 log10 rms).
/// Throws DataError on an all-zero buffer.
double RmsGain(const AudioBuffer &buf, double target_dbfs);

/// Scales by RmsGain() and clamps to [-1, 1].
AudioBuffer RmsNormalize(const AudioBuffer &buf, double target_dbfs);

enum class DurationMode { kRepeatPad, kRandomSlice };

/// Forces the buffer to exactly round(target_seconds * sample_rate) samples.
/// Shorter inputs are always tiled (out[i] = in[i mod len]).  Longer inputs
/// are truncated to the leading window under kRepeatPad, or cut at a seeded
/// uniform offset under kRandomSlice.
AudioBuffer FixDuration(const AudioBuffer &buf, double target_seconds,
                        DurationMode mode, uint64_t seed);

/// Same as FixDuration but with the target given in samples.
AudioBuffer FixLength(const AudioBuffer &buf, size_t target_samples,
                      DurationMode mode, uint64_t seed);

}  // namespace antispoof

#endif  // ANTISPOOF_AUDIO_IO_H_
