// antispoof/include/antispoof/channel-sim.h

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

// Offline augmentation: compression round trips for compressed-media data
// and channel/codec/bandwidth degradation chains for telephony data.
//
// A recipe is an ordered list of steps applied one after another.  Channel
// recipes follow the order gain -> (resample to codec rate) -> band-pass ->
// codec -> packet loss -> resample to the dataset rate.

#ifndef ANTISPOOF_CHANNEL_SIM_H_
#define ANTISPOOF_CHANNEL_SIM_H_

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "antispoof/audio-io.h"
#include "json.hpp"

namespace antispoof {

class ExternalCodecClient;

enum class CodecName { kG711Ulaw, kG711Alaw, kExternal };
enum class ChannelClass { kLandline, kCellular, kVoip, kSatellite, kNone };
enum class BandwidthClass { kNarrowband8k, kWideband16k };
enum class ExternalFormat {
  kMp3, kM4aAac, kOggVorbis, kOpus, kAmr, kAmrWb, kGsm,
  kG722, kG726, kG728, kG729, kSilk, kSilkWb, kFlac,
};

std::string ExternalFormatName(ExternalFormat f);
/// Accepts the canonical names (mp3, m4a_aac, ogg_vorbis, ...), plus "m4a",
/// "aac" and "ogg" as aliases.
ExternalFormat ParseExternalFormat(const std::string &name);
std::string ChannelClassName(ChannelClass c);
ChannelClass ParseChannelClass(const std::string &name);

struct CodecSpec {
  CodecName name = CodecName::kG711Ulaw;
  ChannelClass channel_class = ChannelClass::kNone;
  BandwidthClass bandwidth = BandwidthClass::kNarrowband8k;
  std::optional<ExternalFormat> external_format;
  std::optional<double> bitrate_kbps;

  /// Short label, e.g. "g711_ulaw" or "mp3".
  std::string Label() const;
};

struct GainStep { double target_dbfs = -20.0; };
struct BandlimitStep { double low_hz = 300.0; double high_hz = 3400.0; };
struct CodecStep { CodecSpec codec; };
struct PacketLossStep { double prob = 0.0; double frame_ms = 20.0; };
struct ResampleStep { int target_hz = 16000; };

using RecipeStep =
    std::variant<GainStep, BandlimitStep, CodecStep, PacketLossStep, ResampleStep>;

struct AugmentationRecipe {
  std::vector<RecipeStep> steps;
  uint64_t seed = 0;
  std::string recipe_id;
};

/// Narrowband and wideband telephony pass bands.
inline constexpr double kNarrowbandLowHz = 300.0;
inline constexpr double kNarrowbandHighHz = 3400.0;
inline constexpr double kWidebandLowHz = 50.0;
inline constexpr double kWidebandHighHz = 7000.0;

/// Zero-phase Kaiser-windowed FIR band-pass.  The lower transition runs
/// from low/2 to low, the upper one from high to min(1.1 high, Nyquist);
/// stop-band attenuation 60 dB.  low == 0 skips the high-pass half, and
/// high == Nyquist skips the low-pass half.  Throws std::invalid_argument
/// unless 0 <= low < high <= Nyquist.
AudioBuffer Bandlimit(const AudioBuffer &buf, double low_hz, double high_hz);

/// Splits the signal into consecutive frame_ms frames (the tail frame may be
/// shorter) and zeroes each independently with probability prob.
AudioBuffer PacketLoss(const AudioBuffer &buf, double prob, double frame_ms,
                       uint64_t seed);

/// Applies each step in order.  External codec steps need `codecs`; without
/// one they throw ToolError.  The result is trimmed or zero-padded to
/// round(len * final_rate / input_rate) samples.
AudioBuffer ApplyRecipe(const AudioBuffer &buf, const AugmentationRecipe &recipe,
                        ExternalCodecClient *codecs = nullptr);

/// Codec families offered per channel class.
enum class LaCodec {
  kG711, kG726, kAmr, kAmrWb, kGsm, kSilk, kG722, kSilkWb, kG729, kG728,
};

std::string LaCodecName(LaCodec c);
const std::vector<LaCodec> &ChannelCodecs(ChannelClass channel);
bool IsWidebandCodec(LaCodec c);

struct LaRecipeOptions {
  int target_rate = 8000;  // final dataset rate
  double gain_min_dbfs = -30.0;
  double gain_max_dbfs = -10.0;
  double packet_loss_max = 0.05;  // prob ~ U[0, max]
  double packet_frame_ms = 20.0;
  /// Candidate bitrates (kbps) per codec family; missing entries fall back
  /// to DefaultLaBitrates().
  std::map<LaCodec, std::vector<double>> bitrates;
};

const std::map<LaCodec, std::vector<double>> &DefaultLaBitrates();

/// Draws a telephony degradation chain for one channel: codec uniform over
/// the channel's family list (G.711 then u-law or A-law with equal
/// probability), gain ~ U[gain_min, gain_max], bitrate uniform over the
/// family's list, packet-loss probability ~ U[0, packet_loss_max].
AugmentationRecipe BuildLaRecipe(ChannelClass channel, uint64_t seed,
                                 const LaRecipeOptions &opts = {});

/// Bitrate grid (kbps) for compression augmentation.
const std::map<ExternalFormat, std::vector<double>> &DfBitrateGrid();

/// Single codec round trip followed by resample(16000).  With strict set,
/// (format, bitrate) must be in DfBitrateGrid(); throws UsageError otherwise.
AugmentationRecipe BuildDfRecipe(ExternalFormat format, double bitrate_kbps,
                                 bool strict = true);

nlohmann::json RecipeToJson(const AugmentationRecipe &recipe);
AugmentationRecipe RecipeFromJson(const nlohmann::json &j);

}  // namespace antispoof

#endif  // ANTISPOOF_CHANNEL_SIM_H_
