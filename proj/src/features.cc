// antispoof/src/features.cc

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

#include "antispoof/features.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "antispoof/common.h"
#include "antispoof/signal-util.h"

namespace antispoof {

std::string FeatureKindName(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kLogSpecOneSided: return "logspec_onesided";
    case FeatureKind::kLogSpecDoubleSided: return "logspec_doublesided";
    case FeatureKind::kLfccStack: return "lfcc_stack";
  }
  return "unknown";
}

FeatureKind ParseFeatureKind(const std::string &name) {
  if (name == "logspec_onesided") return FeatureKind::kLogSpecOneSided;
  if (name == "logspec_doublesided") return FeatureKind::kLogSpecDoubleSided;
  if (name == "lfcc" || name == "lfcc_stack") return FeatureKind::kLfccStack;
  throw UsageError("unknown feature kind: " + name);
}

size_t DeriveNfft(double frame_length, int sample_rate) {
  const double samples = frame_length * sample_rate;
  if (!(samples >= 1.0))
    throw std::invalid_argument("DeriveNfft: frame shorter than one sample");
  // Round first so 0.025 * 16000 = 400.00000000000006 does not become 401.
  const double rounded = std::round(samples);
  const auto need = std::abs(samples - rounded) < 1e-9
                        ? static_cast<size_t>(rounded)
                        : static_cast<size_t>(std::ceil(samples));
  return NextPowerOfTwo(need);
}

size_t FrameSamples(double seconds, int sample_rate) {
  return static_cast<size_t>(std::llround(seconds * sample_rate));
}

size_t NumFrames(size_t len, size_t frame, size_t hop) {
  if (frame == 0 || hop == 0 || len < frame) return 0;
  return 1 + (len - frame) / hop;
}

namespace {

struct FrameGeometry {
  size_t frame, hop, nfft, frames;
};

FrameGeometry Geometry(size_t len, int sample_rate, double frame_s,
                       double hop_s, size_t nfft) {
  FrameGeometry g;
  g.frame = FrameSamples(frame_s, sample_rate);
  g.hop = FrameSamples(hop_s, sample_rate);
  if (g.frame == 0 || g.hop == 0)
    throw std::invalid_argument("frame and hop must be at least one sample");
  g.nfft = nfft ? nfft : DeriveNfft(frame_s, sample_rate);
  if (!IsPowerOfTwo(g.nfft) || g.nfft < g.frame)
    throw std::invalid_argument("nfft must be a power of two >= frame length");
  g.frames = NumFrames(len, g.frame, g.hop);
  if (g.frames == 0)
    throw std::invalid_argument("buffer shorter than one analysis frame");
  return g;
}

// Power spectra of Hann-windowed frames; rows = bins, cols = frames.
Matrix FramePower(std::span<const double> x, const FrameGeometry &g,
                  size_t bins) {
  const std::vector<double> window = HannWindow(g.frame);
  Matrix out(bins, g.frames);
  std::vector<std::complex<double>> buf(g.nfft);
  for (size_t t = 0; t < g.frames; ++t) {
    std::fill(buf.begin(), buf.end(), std::complex<double>());
    const double *frame = x.data() + t * g.hop;
    for (size_t i = 0; i < g.frame; ++i) buf[i] = frame[i] * window[i];
    Fft(buf);
    for (size_t k = 0; k < bins; ++k) out(k, t) = std::norm(buf[k]);
  }
  return out;
}

}  // namespace

Matrix StftPower(const AudioBuffer &buf, const StftConfig &cfg,
                 bool full_spectrum) {
  const FrameGeometry g =
      Geometry(buf.size(), buf.sample_rate, cfg.frame_length, cfg.hop, cfg.nfft);
  return FramePower(buf.samples, g, full_spectrum ? g.nfft : g.nfft / 2 + 1);
}

FeatureMatrix LogSpec(const AudioBuffer &buf, const StftConfig &cfg,
                      bool double_sided) {
  Matrix power = StftPower(buf, cfg, false);
  FeatureMatrix out;
  out.sample_rate = buf.sample_rate;
  if (!double_sided) {
    for (double &v : power.Data()) v = std::log(std::max(v, kLogFloor));
    out.values = std::move(power);
    out.kind = FeatureKind::kLogSpecOneSided;
    return out;
  }
  // Bins above nfft/2 are the conjugate mirror of the one-sided half.
  const size_t nfft = 2 * (power.NumRows() - 1), frames = power.NumCols();
  Matrix shifted(nfft, frames);
  for (size_t r = 0; r < nfft; ++r) {
    size_t bin = (r + nfft / 2) % nfft;
    if (bin > nfft / 2) bin = nfft - bin;
    for (size_t t = 0; t < frames; ++t)
      shifted(r, t) = std::log(std::max(power(bin, t), kLogFloor));
  }
  out.values = std::move(shifted);
  out.kind = FeatureKind::kLogSpecDoubleSided;
  return out;
}

Matrix Deltas(const Matrix &m, int window) {
  if (window < 1) throw std::invalid_argument("Deltas: window must be >= 1");
  const size_t rows = m.NumRows(), cols = m.NumCols();
  Matrix d(rows, cols);
  if (cols == 0) return d;
  double denom = 0.0;
  for (int n = 1; n <= window; ++n) denom += 2.0 * n * n;
  const auto last = static_cast<long>(cols) - 1;
  for (size_t t = 0; t < cols; ++t) {
    for (int n = 1; n <= window; ++n) {
      const size_t ahead = static_cast<size_t>(std::min<long>(last, long(t) + n));
      const size_t behind = static_cast<size_t>(std::max<long>(0, long(t) - n));
      for (size_t r = 0; r < rows; ++r)
        d(r, t) += n * (m(r, ahead) - m(r, behind));
    }
    for (size_t r = 0; r < rows; ++r) d(r, t) /= denom;
  }
  return d;
}

Matrix LfccStatics(const AudioBuffer &buf, const LfccConfig &cfg) {
  if (cfg.n_filters < 1 || cfg.n_coeffs < 1 || cfg.n_coeffs > cfg.n_filters)
    throw std::invalid_argument("LfccConfig: need 1 <= n_coeffs <= n_filters");
  if (!(cfg.pre_emphasis >= 0.0 && cfg.pre_emphasis < 1.0))
    throw std::invalid_argument("LfccConfig: pre_emphasis must be in [0, 1)");
  const double hop_s = cfg.window - cfg.overlap;
  if (!(hop_s > 0.0)) throw std::invalid_argument("LfccConfig: overlap >= window");
  const FrameGeometry g =
      Geometry(buf.size(), buf.sample_rate, cfg.window, hop_s, 0);

  std::vector<double> y(buf.size());
  y[0] = buf.samples[0];
  for (size_t n = 1; n < y.size(); ++n)
    y[n] = buf.samples[n] - cfg.pre_emphasis * buf.samples[n - 1];

  const size_t bins = g.nfft / 2 + 1;
  const Matrix power = FramePower(y, g, bins);

  // Triangular filters with linearly spaced edges over [0, Nyquist].
  const int nf = cfg.n_filters;
  const double nyquist = buf.sample_rate / 2.0;
  const double bin_hz = static_cast<double>(buf.sample_rate) / g.nfft;
  Matrix fbank(static_cast<size_t>(nf), bins);
  for (int m = 0; m < nf; ++m) {
    const double lo = nyquist * m / (nf + 1);
    const double mid = nyquist * (m + 1) / (nf + 1);
    const double hi = nyquist * (m + 2) / (nf + 1);
    for (size_t k = 0; k < bins; ++k) {
      const double f = k * bin_hz;
      double w = 0.0;
      if (f > lo && f <= mid) w = (f - lo) / (mid - lo);
      else if (f > mid && f < hi) w = (hi - f) / (hi - mid);
      fbank(m, k) = w;
    }
  }

  // Orthonormal DCT-II basis.
  const int nc = cfg.n_coeffs;
  Matrix dct(static_cast<size_t>(nc), static_cast<size_t>(nf));
  for (int k = 0; k < nc; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / nf);
    for (int m = 0; m < nf; ++m)
      dct(k, m) = scale * std::cos(std::numbers::pi * k * (m + 0.5) / nf);
  }

  Matrix statics(static_cast<size_t>(nc), g.frames);
  std::vector<double> logfb(static_cast<size_t>(nf));
  for (size_t t = 0; t < g.frames; ++t) {
    for (int m = 0; m < nf; ++m) {
      double e = 0.0;
      for (size_t k = 0; k < bins; ++k) e += fbank(m, k) * power(k, t);
      logfb[m] = std::log(std::max(e, kLogFloor));
    }
    for (int k = 0; k < nc; ++k) {
      double c = 0.0;
      for (int m = 0; m < nf; ++m) c += dct(k, m) * logfb[m];
      statics(k, t) = c;
    }
  }
  return statics;
}

Matrix FixFrames(const Matrix &m, size_t target, uint64_t seed) {
  const size_t cols = m.NumCols(), rows = m.NumRows();
  if (cols == 0) throw std::invalid_argument("FixFrames: empty matrix");
  size_t offset = 0;
  if (cols > target) {
    Rng rng(seed);
    offset = static_cast<size_t>(rng.UniformInt(0, static_cast<int64_t>(cols - target)));
  }
  Matrix out(rows, target);
  for (size_t t = 0; t < target; ++t) {
    const size_t src = (offset + t) % cols;
    for (size_t r = 0; r < rows; ++r) out(r, t) = m(r, src);
  }
  return out;
}

FeatureMatrix Lfcc(const AudioBuffer &buf, const LfccConfig &cfg,
                   uint64_t seed) {
  const Matrix statics = LfccStatics(buf, cfg);
  const Matrix d1 = Deltas(statics, cfg.delta_window);
  const Matrix d2 = Deltas(d1, cfg.delta_window);
  const size_t nc = statics.NumRows(), frames = statics.NumCols();
  Matrix stack(3 * nc, frames);
  for (size_t r = 0; r < nc; ++r) {
    for (size_t t = 0; t < frames; ++t) {
      stack(r, t) = statics(r, t);
      stack(nc + r, t) = d1(r, t);
      stack(2 * nc + r, t) = d2(r, t);
    }
  }
  FeatureMatrix out;
  out.kind = FeatureKind::kLfccStack;
  out.sample_rate = buf.sample_rate;
  out.values = cfg.target_frames > 0
                   ? FixFrames(stack, static_cast<size_t>(cfg.target_frames), seed)
                   : std::move(stack);
  return out;
}

double OccupiedBandwidth(const AudioBuffer &buf, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("OccupiedBandwidth: fraction must be in (0, 1)");
  if (buf.empty()) throw DataError("OccupiedBandwidth: empty buffer");
  const size_t n = buf.size();
  const size_t nfft = NextPowerOfTwo(n);
  const std::vector<double> window = HannWindow(n);
  std::vector<double> xw(n);
  for (size_t i = 0; i < n; ++i) xw[i] = buf.samples[i] * window[i];
  const std::vector<double> full = PowerSpectrumFull(xw, nfft);

  // One-sided density; interior bins carry their negative-frequency twin.
  const size_t bins = nfft / 2 + 1;
  std::vector<double> p(bins);
  double total = 0.0;
  for (size_t k = 0; k < bins; ++k) {
    p[k] = (k == 0 || k == nfft / 2) ? full[k] : 2.0 * full[k];
    total += p[k];
  }
  if (!(total > 0.0)) throw DataError("OccupiedBandwidth: all-zero buffer");

  // Bin k spans [(k - 1/2) df, (k + 1/2) df] clipped to [0, fs/2]; power is
  // spread uniformly across that span.
  const double df = static_cast<double>(buf.sample_rate) / nfft;
  const double nyquist = buf.sample_rate / 2.0;
  auto span_lo = [&](size_t k) { return std::max(0.0, (k - 0.5) * df); };
  auto span_hi = [&](size_t k) { return std::min(nyquist, (k + 0.5) * df); };
  auto locate = [&](double level) {
    double cum = 0.0;
    for (size_t k = 0; k < bins; ++k) {
      if (p[k] > 0.0 && cum + p[k] >= level) {
        const double frac = (level - cum) / p[k];
        return span_lo(k) + frac * (span_hi(k) - span_lo(k));
      }
      cum += p[k];
    }
    return nyquist;
  };
  const double tail = 0.5 * (1.0 - fraction) * total;
  const double f_lo = locate(tail);
  const double f_hi = locate(total - tail);
  return std::max(0.0, f_hi - f_lo);
}

BandClass RouteByBandwidth(double bw, double threshold) {
  if (!(bw >= 0.0)) throw std::invalid_argument("RouteByBandwidth: negative bandwidth");
  return bw <= threshold ? BandClass::kNarrowband : BandClass::kWideband;
}

}  // namespace antispoof
