// antispoof/src/channel-sim.cc

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

#include "antispoof/channel-sim.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include "antispoof/common.h"
#include "antispoof/external-codec.h"
#include "antispoof/g711.h"
#include "antispoof/signal-util.h"

namespace antispoof {

namespace {

struct FormatInfo {
  ExternalFormat format;
  const char *name;
};

constexpr FormatInfo kFormats[] = {
    {ExternalFormat::kMp3, "mp3"},       {ExternalFormat::kM4aAac, "m4a_aac"},
    {ExternalFormat::kOggVorbis, "ogg_vorbis"},
    {ExternalFormat::kOpus, "opus"},     {ExternalFormat::kAmr, "amr"},
    {ExternalFormat::kAmrWb, "amr_wb"},  {ExternalFormat::kGsm, "gsm"},
    {ExternalFormat::kG722, "g722"},     {ExternalFormat::kG726, "g726"},
    {ExternalFormat::kG728, "g728"},     {ExternalFormat::kG729, "g729"},
    {ExternalFormat::kSilk, "silk"},     {ExternalFormat::kSilkWb, "silk_wb"},
    {ExternalFormat::kFlac, "flac"},
};

constexpr double kBandStopDb = 60.0;

std::vector<double> FftConvolveSame(const std::vector<double> &x,
                                    const std::vector<double> &h) {
  // h has odd length 2M+1 and is centred; output aligned with x.
  const size_t m = h.size() / 2;
  const size_t n = NextPowerOfTwo(x.size() + h.size() - 1);
  std::vector<std::complex<double>> a(n), b(n);
  for (size_t i = 0; i < x.size(); ++i) a[i] = x[i];
  for (size_t i = 0; i < h.size(); ++i) b[i] = h[i];
  Fft(a);
  Fft(b);
  for (size_t i = 0; i < n; ++i) a[i] *= b[i];
  Fft(a, true);
  std::vector<double> y(x.size());
  for (size_t i = 0; i < x.size(); ++i) y[i] = a[i + m].real();
  return y;
}

}  // namespace

std::string ExternalFormatName(ExternalFormat f) {
  for (const auto &info : kFormats)
    if (info.format == f) return info.name;
  return "unknown";
}

ExternalFormat ParseExternalFormat(const std::string &name) {
  if (name == "m4a" || name == "aac") return ExternalFormat::kM4aAac;
  if (name == "ogg" || name == "vorbis") return ExternalFormat::kOggVorbis;
  if (name == "amrwb") return ExternalFormat::kAmrWb;
  if (name == "silkwb") return ExternalFormat::kSilkWb;
  for (const auto &info : kFormats)
    if (name == info.name) return info.format;
  throw UsageError("unknown external codec format: " + name);
}

std::string ChannelClassName(ChannelClass c) {
  switch (c) {
    case ChannelClass::kLandline: return "landline";
    case ChannelClass::kCellular: return "cellular";
    case ChannelClass::kVoip: return "voip";
    case ChannelClass::kSatellite: return "satellite";
    case ChannelClass::kNone: return "none";
  }
  return "none";
}

ChannelClass ParseChannelClass(const std::string &name) {
  for (ChannelClass c : {ChannelClass::kLandline, ChannelClass::kCellular,
                         ChannelClass::kVoip, ChannelClass::kSatellite,
                         ChannelClass::kNone})
    if (name == ChannelClassName(c)) return c;
  throw UsageError("unknown channel class: " + name);
}

std::string CodecSpec::Label() const {
  switch (name) {
    case CodecName::kG711Ulaw: return "g711_ulaw";
    case CodecName::kG711Alaw: return "g711_alaw";
    case CodecName::kExternal:
      return external_format ? ExternalFormatName(*external_format) : "external";
  }
  return "unknown";
}

AudioBuffer Bandlimit(const AudioBuffer &buf, double low_hz, double high_hz) {
  const double fs = buf.sample_rate;
  const double nyquist = fs / 2.0;
  if (!(low_hz >= 0.0 && low_hz < high_hz && high_hz <= nyquist))
    throw std::invalid_argument("Bandlimit: need 0 <= low < high <= Nyquist");

  const bool highpass = low_hz > 0.0;
  const double upper_room = nyquist - high_hz;
  const bool lowpass = upper_room > 1e-9 * nyquist;
  if (!highpass && !lowpass) return buf;

  const double low_trans = 0.5 * low_hz;
  const double high_trans = std::min(0.1 * high_hz, upper_room);
  double narrowest = std::numeric_limits<double>::infinity();
  if (highpass) narrowest = std::min(narrowest, low_trans);
  if (lowpass) narrowest = std::min(narrowest, high_trans);
  const double beta = KaiserBeta(kBandStopDb);
  const double dw = 2.0 * std::numbers::pi * narrowest / fs;
  const auto half = static_cast<size_t>(
      std::ceil((kBandStopDb - 8.0) / (2.285 * dw) / 2.0));

  const double fc_low = low_hz - 0.5 * low_trans;
  const double fc_high = high_hz + 0.5 * high_trans;
  std::vector<double> h(2 * half + 1);
  for (size_t i = 0; i < h.size(); ++i) {
    const double n = static_cast<double>(i) - static_cast<double>(half);
    const double lp_hi =
        lowpass ? 2.0 * fc_high / fs * Sinc(2.0 * fc_high / fs * n) : (n == 0 ? 1.0 : 0.0);
    const double lp_lo = highpass ? 2.0 * fc_low / fs * Sinc(2.0 * fc_low / fs * n) : 0.0;
    h[i] = (lp_hi - lp_lo) * KaiserAt(n, static_cast<double>(half), beta);
  }

  AudioBuffer out = buf;
  if (buf.empty()) return out;
  out.samples = FftConvolveSame(buf.samples, h);
  return out;
}

AudioBuffer PacketLoss(const AudioBuffer &buf, double prob, double frame_ms,
                       uint64_t seed) {
  if (!(prob >= 0.0 && prob < 1.0))
    throw std::invalid_argument("PacketLoss: prob must be in [0, 1)");
  if (!(frame_ms > 0.0)) throw std::invalid_argument("PacketLoss: frame_ms must be > 0");
  AudioBuffer out = buf;
  if (prob == 0.0) return out;
  const auto frame = std::max<size_t>(
      1, static_cast<size_t>(std::llround(frame_ms * buf.sample_rate / 1000.0)));
  Rng rng(seed);
  for (size_t start = 0; start < out.size(); start += frame) {
    if (rng.Bernoulli(prob)) {
      const size_t end = std::min(out.size(), start + frame);
      std::fill(out.samples.begin() + start, out.samples.begin() + end, 0.0);
    }
  }
  return out;
}

namespace {

AudioBuffer ApplyCodec(const AudioBuffer &buf, const CodecSpec &codec,
                       const std::string &recipe_id,
                       ExternalCodecClient *codecs) {
  switch (codec.name) {
    case CodecName::kG711Ulaw: return MulawRoundTrip(buf);
    case CodecName::kG711Alaw: return AlawRoundTrip(buf);
    case CodecName::kExternal:
      if (!codec.external_format)
        throw std::invalid_argument("external codec step without a format");
      if (codecs == nullptr)
        throw ToolError("recipe " + recipe_id + " needs external codec " +
                        ExternalFormatName(*codec.external_format) +
                        " but no codec client is configured");
      return codecs->RoundTrip(buf, *codec.external_format, codec.bitrate_kbps,
                               recipe_id);
  }
  return buf;
}

}  // namespace

AudioBuffer ApplyRecipe(const AudioBuffer &buf, const AugmentationRecipe &recipe,
                        ExternalCodecClient *codecs) {
  if (recipe.steps.empty())
    throw std::invalid_argument("ApplyRecipe: recipe " + recipe.recipe_id +
                                " has no steps");
  AudioBuffer cur = buf;
  for (size_t i = 0; i < recipe.steps.size(); ++i) {
    const RecipeStep &step = recipe.steps[i];
    if (const auto *g = std::get_if<GainStep>(&step)) {
      if (Rms(cur.samples) > 0.0) cur = RmsNormalize(cur, g->target_dbfs);
      else LogWarning("skipping gain on silent buffer " + cur.source_id);
    } else if (const auto *b = std::get_if<BandlimitStep>(&step)) {
      cur = Bandlimit(cur, b->low_hz, std::min(b->high_hz, cur.sample_rate / 2.0));
    } else if (const auto *c = std::get_if<CodecStep>(&step)) {
      cur = ApplyCodec(cur, c->codec, recipe.recipe_id, codecs);
    } else if (const auto *p = std::get_if<PacketLossStep>(&step)) {
      const uint64_t seed =
          DeriveSeed(recipe.seed, {"packet_loss", std::to_string(i)});
      cur = PacketLoss(cur, p->prob, p->frame_ms, seed);
    } else if (const auto *r = std::get_if<ResampleStep>(&step)) {
      cur = Resample(cur, r->target_hz);
    }
  }
  const auto want = static_cast<size_t>(
      (static_cast<int64_t>(buf.size()) * cur.sample_rate + buf.sample_rate / 2) /
      buf.sample_rate);
  cur.samples.resize(want, 0.0);
  for (double &v : cur.samples) v = std::clamp(v, -1.0, 1.0);
  cur.source_id = buf.source_id;
  return cur;
}

std::string LaCodecName(LaCodec c) {
  switch (c) {
    case LaCodec::kG711: return "g711";
    case LaCodec::kG726: return "g726";
    case LaCodec::kAmr: return "amr";
    case LaCodec::kAmrWb: return "amr_wb";
    case LaCodec::kGsm: return "gsm";
    case LaCodec::kSilk: return "silk";
    case LaCodec::kG722: return "g722";
    case LaCodec::kSilkWb: return "silk_wb";
    case LaCodec::kG729: return "g729";
    case LaCodec::kG728: return "g728";
  }
  return "unknown";
}

const std::vector<LaCodec> &ChannelCodecs(ChannelClass channel) {
  static const std::vector<LaCodec> landline = {LaCodec::kG711, LaCodec::kG726};
  static const std::vector<LaCodec> cellular = {LaCodec::kAmr, LaCodec::kAmrWb,
                                                LaCodec::kGsm};
  static const std::vector<LaCodec> voip = {LaCodec::kSilk, LaCodec::kG722,
                                            LaCodec::kSilkWb, LaCodec::kG729};
  static const std::vector<LaCodec> satellite = {LaCodec::kG728};
  switch (channel) {
    case ChannelClass::kLandline: return landline;
    case ChannelClass::kCellular: return cellular;
    case ChannelClass::kVoip: return voip;
    case ChannelClass::kSatellite: return satellite;
    case ChannelClass::kNone: break;
  }
  throw std::invalid_argument("ChannelCodecs: channel class 'none' has no codecs");
}

bool IsWidebandCodec(LaCodec c) {
  return c == LaCodec::kAmrWb || c == LaCodec::kG722 || c == LaCodec::kSilkWb;
}

const std::map<LaCodec, std::vector<double>> &DefaultLaBitrates() {
  static const std::map<LaCodec, std::vector<double>> table = {
      {LaCodec::kG711, {64}},
      {LaCodec::kG726, {16, 24, 32, 40}},
      {LaCodec::kAmr, {4.75, 5.15, 5.9, 6.7, 7.4, 7.95, 10.2, 12.2}},
      {LaCodec::kAmrWb, {6.6, 8.85, 12.65, 14.25, 15.85, 18.25, 19.85, 23.05, 23.85}},
      {LaCodec::kGsm, {13}},
      {LaCodec::kSilk, {6, 8, 12, 16, 20}},
      {LaCodec::kG722, {48, 56, 64}},
      {LaCodec::kSilkWb, {8, 12, 16, 24, 32}},
      {LaCodec::kG729, {8}},
      {LaCodec::kG728, {16}},
  };
  return table;
}

namespace {

ExternalFormat ExternalFormatFor(LaCodec c) {
  switch (c) {
    case LaCodec::kG726: return ExternalFormat::kG726;
    case LaCodec::kAmr: return ExternalFormat::kAmr;
    case LaCodec::kAmrWb: return ExternalFormat::kAmrWb;
    case LaCodec::kGsm: return ExternalFormat::kGsm;
    case LaCodec::kSilk: return ExternalFormat::kSilk;
    case LaCodec::kG722: return ExternalFormat::kG722;
    case LaCodec::kSilkWb: return ExternalFormat::kSilkWb;
    case LaCodec::kG729: return ExternalFormat::kG729;
    case LaCodec::kG728: return ExternalFormat::kG728;
    case LaCodec::kG711: break;
  }
  throw std::invalid_argument("G.711 is native, not external");
}

std::string FormatNumber(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

}  // namespace

AugmentationRecipe BuildLaRecipe(ChannelClass channel, uint64_t seed,
                                 const LaRecipeOptions &opts) {
  const std::vector<LaCodec> &family = ChannelCodecs(channel);
  Rng rng(seed);
  const LaCodec codec_family = family[static_cast<size_t>(
      rng.UniformInt(0, static_cast<int64_t>(family.size()) - 1))];

  const bool wideband = IsWidebandCodec(codec_family);
  CodecSpec spec;
  spec.channel_class = channel;
  spec.bandwidth = wideband ? BandwidthClass::kWideband16k : BandwidthClass::kNarrowband8k;
  if (codec_family == LaCodec::kG711) {
    spec.name = rng.Bernoulli(0.5) ? CodecName::kG711Alaw : CodecName::kG711Ulaw;
  } else {
    spec.name = CodecName::kExternal;
    spec.external_format = ExternalFormatFor(codec_family);
  }

  const double gain = rng.Uniform(opts.gain_min_dbfs, opts.gain_max_dbfs);

  auto it = opts.bitrates.find(codec_family);
  const std::vector<double> &rates =
      it != opts.bitrates.end() ? it->second : DefaultLaBitrates().at(codec_family);
  if (rates.empty()) throw UsageError("empty bitrate list for " + LaCodecName(codec_family));
  spec.bitrate_kbps =
      rates[static_cast<size_t>(rng.UniformInt(0, static_cast<int64_t>(rates.size()) - 1))];

  const double loss = rng.Uniform(0.0, opts.packet_loss_max);

  AugmentationRecipe recipe;
  recipe.seed = seed;
  recipe.recipe_id = "la_" + ChannelClassName(channel) + "_" + spec.Label() + "_" +
                     FormatNumber(*spec.bitrate_kbps);
  const int codec_rate = wideband ? 16000 : 8000;
  recipe.steps.push_back(GainStep{gain});
  recipe.steps.push_back(ResampleStep{codec_rate});
  if (wideband) recipe.steps.push_back(BandlimitStep{kWidebandLowHz, kWidebandHighHz});
  else recipe.steps.push_back(BandlimitStep{kNarrowbandLowHz, kNarrowbandHighHz});
  recipe.steps.push_back(CodecStep{spec});
  recipe.steps.push_back(PacketLossStep{loss, opts.packet_frame_ms});
  recipe.steps.push_back(ResampleStep{opts.target_rate});
  return recipe;
}

const std::map<ExternalFormat, std::vector<double>> &DfBitrateGrid() {
  static const std::map<ExternalFormat, std::vector<double>> grid = {
      {ExternalFormat::kMp3, {16, 48, 96, 128, 160}},
      {ExternalFormat::kM4aAac, {64, 96, 128}},
  };
  return grid;
}

AugmentationRecipe BuildDfRecipe(ExternalFormat format, double bitrate_kbps,
                                 bool strict) {
  if (!(bitrate_kbps > 0.0)) throw UsageError("bitrate must be positive");
  if (format != ExternalFormat::kMp3 && format != ExternalFormat::kM4aAac)
    throw UsageError("compression recipes use mp3 or m4a_aac, not " +
                     ExternalFormatName(format));
  if (strict) {
    const auto &allowed = DfBitrateGrid().at(format);
    if (std::find(allowed.begin(), allowed.end(), bitrate_kbps) == allowed.end())
      throw UsageError(ExternalFormatName(format) + " at " + FormatNumber(bitrate_kbps) +
                       " kbps is not in the compression bitrate grid");
  }
  CodecSpec spec;
  spec.name = CodecName::kExternal;
  spec.channel_class = ChannelClass::kNone;
  spec.bandwidth = BandwidthClass::kWideband16k;
  spec.external_format = format;
  spec.bitrate_kbps = bitrate_kbps;
  AugmentationRecipe recipe;
  recipe.recipe_id = "df_" + ExternalFormatName(format) + "_" + FormatNumber(bitrate_kbps);
  recipe.steps.push_back(CodecStep{spec});
  recipe.steps.push_back(ResampleStep{16000});
  return recipe;
}

nlohmann::json RecipeToJson(const AugmentationRecipe &recipe) {
  using nlohmann::json;
  json steps = json::array();
  for (const RecipeStep &step : recipe.steps) {
    if (const auto *g = std::get_if<GainStep>(&step)) {
      steps.push_back({{"type", "gain"}, {"target_dbfs", g->target_dbfs}});
    } else if (const auto *b = std::get_if<BandlimitStep>(&step)) {
      steps.push_back({{"type", "bandlimit"}, {"low_hz", b->low_hz}, {"high_hz", b->high_hz}});
    } else if (const auto *c = std::get_if<CodecStep>(&step)) {
      json j = {{"type", "codec"}, {"codec", c->codec.Label()},
                {"channel", ChannelClassName(c->codec.channel_class)},
                {"bandwidth", c->codec.bandwidth == BandwidthClass::kWideband16k
                                  ? "wideband_16k" : "narrowband_8k"}};
      if (c->codec.bitrate_kbps) j["bitrate_kbps"] = *c->codec.bitrate_kbps;
      steps.push_back(j);
    } else if (const auto *p = std::get_if<PacketLossStep>(&step)) {
      steps.push_back({{"type", "packet_loss"}, {"prob", p->prob}, {"frame_ms", p->frame_ms}});
    } else if (const auto *r = std::get_if<ResampleStep>(&step)) {
      steps.push_back({{"type", "resample"}, {"target_hz", r->target_hz}});
    }
  }
  return {{"recipe_id", recipe.recipe_id}, {"seed", recipe.seed}, {"steps", steps}};
}

AugmentationRecipe RecipeFromJson(const nlohmann::json &j) {
  try {
    AugmentationRecipe recipe;
    recipe.recipe_id = j.value("recipe_id", std::string());
    recipe.seed = j.value("seed", uint64_t{0});
    for (const auto &s : j.at("steps")) {
      const std::string type = s.at("type").get<std::string>();
      if (type == "gain") {
        recipe.steps.push_back(GainStep{s.at("target_dbfs").get<double>()});
      } else if (type == "bandlimit") {
        recipe.steps.push_back(
            BandlimitStep{s.at("low_hz").get<double>(), s.at("high_hz").get<double>()});
      } else if (type == "codec") {
        CodecSpec spec;
        const std::string name = s.at("codec").get<std::string>();
        if (name == "g711_ulaw") spec.name = CodecName::kG711Ulaw;
        else if (name == "g711_alaw") spec.name = CodecName::kG711Alaw;
        else {
          spec.name = CodecName::kExternal;
          spec.external_format = ParseExternalFormat(name);
        }
        spec.channel_class = ParseChannelClass(s.value("channel", std::string("none")));
        spec.bandwidth = s.value("bandwidth", std::string("narrowband_8k")) == "wideband_16k"
                             ? BandwidthClass::kWideband16k
                             : BandwidthClass::kNarrowband8k;
        if (s.contains("bitrate_kbps")) spec.bitrate_kbps = s.at("bitrate_kbps").get<double>();
        recipe.steps.push_back(CodecStep{spec});
      } else if (type == "packet_loss") {
        recipe.steps.push_back(
            PacketLossStep{s.at("prob").get<double>(), s.value("frame_ms", 20.0)});
      } else if (type == "resample") {
        recipe.steps.push_back(ResampleStep{s.at("target_hz").get<int>()});
      } else {
        throw UsageError("unknown recipe step type: " + type);
      }
    }
    if (recipe.steps.empty()) throw UsageError("recipe has no steps");
    return recipe;
  } catch (const nlohmann::json::exception &e) {
    throw UsageError(std::string("malformed recipe: ") + e.what());
  }
}

}  // namespace antispoof
