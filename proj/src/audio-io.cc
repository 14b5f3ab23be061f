// antispoof/src/audio-io.cc

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

#include "antispoof/audio-io.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "antispoof/common.h"
#include "antispoof/signal-util.h"

namespace antispoof {

namespace {

uint32_t ReadU32(const uint8_t *p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
         uint32_t(p[3]) << 24;
}

uint16_t ReadU16(const uint8_t *p) { return uint16_t(p[0] | p[1] << 8); }

void PutU32(std::vector<uint8_t> *out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(uint8_t(v >> (8 * i)));
}

void PutU16(std::vector<uint8_t> *out, uint16_t v) {
  out->push_back(uint8_t(v));
  out->push_back(uint8_t(v >> 8));
}

void PutTag(std::vector<uint8_t> *out, const char *tag) {
  out->insert(out->end(), tag, tag + 4);
}

int64_t Gcd(int64_t a, int64_t b) {
  while (b) {
    int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace

int16_t QuantizeSample(double x) {
  double v = std::round(x * 32768.0);  // std::round: ties away from zero
  if (!(v >= -32768.0)) v = -32768.0;  // also maps NaN to the floor
  if (v > 32767.0) v = 32767.0;
  return static_cast<int16_t>(v);
}

std::vector<uint8_t> EncodeWav(const AudioBuffer &buf) {
  if (buf.sample_rate <= 0)
    throw std::invalid_argument("EncodeWav: non-positive sample rate");
  const uint32_t data_bytes = static_cast<uint32_t>(buf.samples.size() * 2);
  std::vector<uint8_t> out;
  out.reserve(44 + data_bytes);
  PutTag(&out, "RIFF");
  PutU32(&out, 36 + data_bytes);
  PutTag(&out, "WAVE");
  PutTag(&out, "fmt ");
  PutU32(&out, 16);
  PutU16(&out, 1);  // PCM
  PutU16(&out, 1);  // mono
  PutU32(&out, static_cast<uint32_t>(buf.sample_rate));
  PutU32(&out, static_cast<uint32_t>(buf.sample_rate) * 2);
  PutU16(&out, 2);
  PutU16(&out, 16);
  PutTag(&out, "data");
  PutU32(&out, data_bytes);
  for (double x : buf.samples) PutU16(&out, static_cast<uint16_t>(QuantizeSample(x)));
  return out;
}

AudioBuffer DecodeWav(std::span<const uint8_t> bytes,
                      const std::string &source_id) {
  const std::string where = source_id.empty() ? "<memory>" : source_id;
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw DataError("not a RIFF/WAVE file: " + where);
  size_t pos = 12;
  bool have_fmt = false;
  AudioBuffer buf;
  buf.source_id = source_id;
  while (pos + 8 <= bytes.size()) {
    const uint8_t *hdr = bytes.data() + pos;
    const uint32_t size = ReadU32(hdr + 4);
    const size_t body = pos + 8;
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (size < 16 || body + 16 > bytes.size())
        throw DataError("truncated fmt chunk: " + where);
      const uint8_t *f = bytes.data() + body;
      uint16_t format = ReadU16(f);
      const uint16_t channels = ReadU16(f + 2);
      const uint32_t rate = ReadU32(f + 4);
      const uint16_t bits = ReadU16(f + 14);
      if (format == 0xFFFE && size >= 40 && body + 26 <= bytes.size())
        format = ReadU16(f + 24);  // WAVE_FORMAT_EXTENSIBLE sub-format
      if (format != 1)
        throw DataError("non-PCM WAV encoding (format " +
                        std::to_string(format) + "): " + where);
      if (channels != 1)
        throw DataError("WAV has " + std::to_string(channels) +
                        " channels; only mono is accepted: " + where);
      if (bits != 16)
        throw DataError("WAV is " + std::to_string(bits) +
                        "-bit; only 16-bit PCM is accepted: " + where);
      if (rate == 0) throw DataError("WAV sample rate is zero: " + where);
      buf.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      if (!have_fmt) throw DataError("data chunk before fmt chunk: " + where);
      // Streams written by pipes sometimes carry a bogus (0 or 0xFFFFFFFF)
      // data size; clamp to what is actually present.
      size_t n = std::min<size_t>(size, bytes.size() - body) / 2;
      buf.samples.resize(n);
      const uint8_t *d = bytes.data() + body;
      for (size_t i = 0; i < n; ++i)
        buf.samples[i] = static_cast<int16_t>(ReadU16(d + 2 * i)) / 32768.0;
      return buf;
    }
    pos = body + size + (size & 1);
  }
  throw DataError("WAV has no data chunk: " + where);
}

AudioBuffer ReadWav(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open WAV file: " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return DecodeWav(bytes, path.string());
}

void WriteWav(const AudioBuffer &buf, const std::filesystem::path &path) {
  std::vector<uint8_t> bytes = EncodeWav(buf);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write WAV file: " + path.string());
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

AudioBuffer Resample(const AudioBuffer &buf, int target_rate,
                     const ResampleOptions &opts) {
  if (target_rate <= 0)
    throw std::invalid_argument("Resample: target rate must be positive");
  if (target_rate == buf.sample_rate) return buf;

  const int64_t src = buf.sample_rate, dst = target_rate;
  const int64_t g = Gcd(src, dst);
  const int64_t up = dst / g, down = src / g;  // output n <-> input n*down/up
  const int64_t in_len = static_cast<int64_t>(buf.samples.size());
  const int64_t out_len = (in_len * dst + src / 2) / src;

  // Cutoff relative to the input rate (cycles per input sample).
  const double cutoff = opts.cutoff_fraction * 0.5 *
                        static_cast<double>(std::min(src, dst)) / src;
  const double half_width = opts.num_zeros / (2.0 * cutoff);  // input samples
  const int64_t reach = static_cast<int64_t>(std::ceil(half_width));
  const int64_t taps = 2 * reach + 1;

  // One kernel per output phase.  Phase p places the output at
  // input position base + p/up.
  std::vector<double> table(static_cast<size_t>(up * taps));
  for (int64_t p = 0; p < up; ++p) {
    const double frac = static_cast<double>(p) / up;
    for (int64_t j = 0; j < taps; ++j) {
      const double tau = frac - static_cast<double>(j - reach);
      table[p * taps + j] = 2.0 * cutoff * Sinc(2.0 * cutoff * tau) *
                            KaiserAt(tau, half_width, opts.kaiser_beta);
    }
  }

  AudioBuffer out;
  out.sample_rate = target_rate;
  out.source_id = buf.source_id;
  out.samples.resize(static_cast<size_t>(out_len));
  const double *x = buf.samples.data();
  for (int64_t n = 0; n < out_len; ++n) {
    const int64_t pos = n * down;
    const int64_t base = pos / up;
    const int64_t phase = pos % up;
    const double *h = &table[phase * taps];
    double acc = 0.0;
    const int64_t k0 = base - reach;
    const int64_t j_lo = std::max<int64_t>(0, -k0);
    const int64_t j_hi = std::min<int64_t>(taps, in_len - k0);
    for (int64_t j = j_lo; j < j_hi; ++j) acc += h[j] * x[k0 + j];
    out.samples[n] = acc;
  }
  return out;
}

double Rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double ss = 0.0;
  for (double v : x) ss += v * v;
  return std::sqrt(ss / static_cast<double>(x.size()));
}

double RmsGain(const AudioBuffer &buf, double target_dbfs) {
  const double rms = Rms(buf.samples);
  if (!(rms > 0.0))
    throw DataError("RMS normalization of an all-zero buffer: " + buf.source_id);
  return std::pow(10.0, target_dbfs / 20.0) / rms;
}

AudioBuffer RmsNormalize(const AudioBuffer &buf, double target_dbfs) {
  const double gain = RmsGain(buf, target_dbfs);
  AudioBuffer out = buf;
  for (double &v : out.samples) v = std::clamp(v * gain, -1.0, 1.0);
  return out;
}

AudioBuffer FixLength(const AudioBuffer &buf, size_t target,
                      DurationMode mode, uint64_t seed) {
  if (buf.empty()) throw std::invalid_argument("FixLength: empty buffer");
  AudioBuffer out;
  out.sample_rate = buf.sample_rate;
  out.source_id = buf.source_id;
  const size_t len = buf.size();
  size_t offset = 0;
  if (len > target && mode == DurationMode::kRandomSlice) {
    Rng rng(seed);
    offset = static_cast<size_t>(rng.UniformInt(0, static_cast<int64_t>(len - target)));
  }
  out.samples.resize(target);
  for (size_t i = 0; i < target; ++i)
    out.samples[i] = buf.samples[(offset + i) % len];
  return out;
}

AudioBuffer FixDuration(const AudioBuffer &buf, double target_seconds,
                        DurationMode mode, uint64_t seed) {
  if (!(target_seconds > 0.0))
    throw std::invalid_argument("FixDuration: target must be positive");
  const auto target =
      static_cast<size_t>(std::llround(target_seconds * buf.sample_rate));
  return FixLength(buf, target, mode, seed);
}

}  // namespace antispoof
