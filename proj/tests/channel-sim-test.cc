// antispoof/tests/channel-sim-test.cc

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

#include <cmath>
#include <map>
#include <set>

#include "antispoof/channel-sim.h"
#include "antispoof/common.h"
#include "antispoof/g711.h"
#include "doctest.h"
#include "test-util.h"

using namespace antispoof;
using namespace antispoof::testing;

namespace {

double GainDb(const AudioBuffer &in, const AudioBuffer &out, double freq) {
  return Db(ToneAmplitude(out.samples, freq, out.sample_rate) /
            ToneAmplitude(in.samples, freq, in.sample_rate));
}

std::string CodecLabelOf(const AugmentationRecipe &r) {
  for (const auto &s : r.steps)
    if (const auto *c = std::get_if<CodecStep>(&s)) return c->codec.Label();
  return "";
}

const CodecSpec *CodecOf(const AugmentationRecipe &r) {
  for (const auto &s : r.steps)
    if (const auto *c = std::get_if<CodecStep>(&s)) return &c->codec;
  return nullptr;
}

}  // namespace

TEST_CASE("narrowband band-pass") {
  for (int rate : {8000, 16000}) {
    CAPTURE(rate);
    for (double f : {400.0, 1000.0, 2000.0, 3000.0, 3400.0}) {
      const AudioBuffer in = MakeTone(f, rate, 1.0);
      CHECK(std::abs(GainDb(in, Bandlimit(in, 300, 3400), f)) <= 1.0);
    }
    for (double f : {150.0, 100.0}) {
      const AudioBuffer in = MakeTone(f, rate, 2.0);
      CHECK(GainDb(in, Bandlimit(in, 300, 3400), f) <= -40.0);
    }
  }
  for (double f : {5000.0, 6800.0, 7500.0}) {
    const AudioBuffer in = MakeTone(f, 16000, 1.0);
    CHECK(GainDb(in, Bandlimit(in, 300, 3400), f) <= -40.0);
  }
}

TEST_CASE("wideband band-pass") {
  for (double f : {100.0, 1000.0, 5000.0, 7000.0}) {
    const AudioBuffer in = MakeTone(f, 16000, 2.0);
    CHECK(std::abs(GainDb(in, Bandlimit(in, 50, 7000), f)) <= 1.0);
  }
  const AudioBuffer low = MakeTone(25.0, 16000, 4.0);
  CHECK(GainDb(low, Bandlimit(low, 50, 7000), 25.0) <= -40.0);
}

TEST_CASE("all-pass limit and edge validation") {
  const AudioBuffer x = MakeNoise(1, 16000, 0.5);
  CHECK(Bandlimit(x, 0, 8000).samples == x.samples);
  const AudioBuffer lp = Bandlimit(x, 0, 4000);
  CHECK(lp.size() == x.size());
  const AudioBuffer t = MakeTone(6000, 16000, 1.0);
  CHECK(GainDb(t, Bandlimit(t, 0, 4000), 6000) <= -40.0);
  CHECK_THROWS_AS(Bandlimit(x, 3400, 300), std::invalid_argument);
  CHECK_THROWS_AS(Bandlimit(x, -1, 300), std::invalid_argument);
  CHECK_THROWS_AS(Bandlimit(x, 300, 9000), std::invalid_argument);
  CHECK_THROWS_AS(Bandlimit(x, 300, 300), std::invalid_argument);
}

TEST_CASE("packet loss") {
  const AudioBuffer x = MakeTone(440, 16000, 10.0, 0.5, 0.3);
  CHECK(PacketLoss(x, 0.0, 20, 1).samples == x.samples);

  for (uint64_t seed = 0; seed < 200; ++seed) {
    const AudioBuffer y = PacketLoss(x, 0.1, 20, seed);
    REQUIRE(y.size() == x.size());
    int zeroed = 0;
    for (size_t f = 0; f < 500; ++f) {
      bool all_zero = true, untouched = true;
      for (size_t i = f * 320; i < (f + 1) * 320; ++i) {
        all_zero &= y.samples[i] == 0.0;
        untouched &= y.samples[i] == x.samples[i];
      }
      CHECK((all_zero || untouched));
      zeroed += all_zero;
    }
    CHECK(zeroed >= 25);
    CHECK(zeroed <= 75);
  }
  CHECK(PacketLoss(x, 0.1, 20, 5).samples == PacketLoss(x, 0.1, 20, 5).samples);
  CHECK(PacketLoss(x, 0.1, 20, 5).samples != PacketLoss(x, 0.1, 20, 6).samples);

  // A short tail frame can be dropped too.
  AudioBuffer tail;
  tail.samples.assign(330, 0.5);
  bool tail_dropped = false;
  for (uint64_t s = 0; s < 100 && !tail_dropped; ++s)
    tail_dropped = PacketLoss(tail, 0.5, 20, s).samples.back() == 0.0;
  CHECK(tail_dropped);
  CHECK_THROWS_AS(PacketLoss(x, 1.0, 20, 0), std::invalid_argument);
  CHECK_THROWS_AS(PacketLoss(x, 0.1, 0, 0), std::invalid_argument);
}

TEST_CASE("telephony recipe applied natively") {
  AugmentationRecipe r;
  r.recipe_id = "la_example";
  r.seed = 3;
  CodecSpec ulaw;
  ulaw.name = CodecName::kG711Ulaw;
  ulaw.channel_class = ChannelClass::kLandline;
  r.steps = {GainStep{-20}, BandlimitStep{300, 3400}, CodecStep{ulaw},
             PacketLossStep{0.02, 20}, ResampleStep{8000}};
  const AudioBuffer in = MakeSpeechLike(2, 16000, 1.5);
  const AudioBuffer out = ApplyRecipe(in, r);
  CHECK(out.sample_rate == 8000);
  CHECK(out.size() == in.size() / 2);
  CHECK(ApplyRecipe(in, r).samples == out.samples);
  for (double v : out.samples) CHECK(std::abs(v) <= 1.0);
  AugmentationRecipe other = r;
  other.seed = 4;
  CHECK(ApplyRecipe(in, other).samples != out.samples);
}

TEST_CASE("identity recipe") {
  AugmentationRecipe r;
  r.steps = {ResampleStep{16000}};
  const AudioBuffer in = MakeNoise(4, 16000, 0.3);
  CHECK(ApplyRecipe(in, r).samples == in.samples);
  CHECK_THROWS_AS(ApplyRecipe(in, AugmentationRecipe{}), std::invalid_argument);
}

TEST_CASE("recipe output length follows the final rate") {
  AugmentationRecipe r;
  CodecSpec alaw;
  alaw.name = CodecName::kG711Alaw;
  r.steps = {ResampleStep{8000}, CodecStep{alaw}, ResampleStep{16000}, ResampleStep{11025}};
  for (size_t len : {1u, 2u, 3u, 101u, 16000u, 16001u}) {
    AudioBuffer in;
    in.sample_rate = 16000;
    in.samples.assign(len, 0.2);
    const AudioBuffer out = ApplyRecipe(in, r);
    CHECK(out.size() == static_cast<size_t>(std::llround(len * 11025.0 / 16000.0)));
    CHECK(out.sample_rate == 11025);
  }
}

TEST_CASE("external steps without a client fail as tool errors") {
  const AugmentationRecipe df = BuildDfRecipe(ExternalFormat::kMp3, 96);
  CHECK_THROWS_AS(ApplyRecipe(MakeNoise(1, 16000, 0.1), df), ToolError);
}

TEST_CASE("silent buffers skip the gain step") {
  AugmentationRecipe r;
  r.steps = {GainStep{-20}};
  AudioBuffer z;
  z.samples.assign(100, 0.0);
  CHECK(ApplyRecipe(z, r).samples == z.samples);
}

TEST_CASE("channel codec families") {
  CHECK(ChannelCodecs(ChannelClass::kLandline) ==
        std::vector<LaCodec>{LaCodec::kG711, LaCodec::kG726});
  CHECK(ChannelCodecs(ChannelClass::kCellular) ==
        std::vector<LaCodec>{LaCodec::kAmr, LaCodec::kAmrWb, LaCodec::kGsm});
  CHECK(ChannelCodecs(ChannelClass::kVoip) ==
        std::vector<LaCodec>{LaCodec::kSilk, LaCodec::kG722, LaCodec::kSilkWb, LaCodec::kG729});
  CHECK(ChannelCodecs(ChannelClass::kSatellite) == std::vector<LaCodec>{LaCodec::kG728});
  CHECK_THROWS_AS(ChannelCodecs(ChannelClass::kNone), std::invalid_argument);
}

TEST_CASE("landline and satellite draws") {
  std::set<std::string> landline;
  for (uint64_t s = 0; s < 500; ++s) {
    landline.insert(CodecLabelOf(BuildLaRecipe(ChannelClass::kLandline, s)));
    CHECK(CodecLabelOf(BuildLaRecipe(ChannelClass::kSatellite, s)) == "g728");
  }
  CHECK(landline == std::set<std::string>{"g711_ulaw", "g711_alaw", "g726"});
}

TEST_CASE("voip codec frequencies") {
  std::map<std::string, int> counts;
  const int n = 10000;
  for (int s = 0; s < n; ++s)
    counts[CodecLabelOf(BuildLaRecipe(ChannelClass::kVoip, DeriveSeed(9, {std::to_string(s)})))]++;
  REQUIRE(counts.size() == 4);
  for (const auto &[name, c] : counts) {
    CAPTURE(name);
    CHECK(std::abs(c / double(n) - 0.25) <= 0.02);
  }
}

TEST_CASE("channel recipe structure") {
  LaRecipeOptions opts;
  opts.target_rate = 16000;
  for (uint64_t s = 0; s < 300; ++s) {
    for (ChannelClass ch : {ChannelClass::kLandline, ChannelClass::kCellular,
                            ChannelClass::kVoip, ChannelClass::kSatellite}) {
      const AugmentationRecipe r = BuildLaRecipe(ch, s, opts);
      REQUIRE(r.steps.size() == 6);
      const auto &gain = std::get<GainStep>(r.steps[0]);
      CHECK(gain.target_dbfs >= -30.0);
      CHECK(gain.target_dbfs <= -10.0);
      const int codec_rate = std::get<ResampleStep>(r.steps[1]).target_hz;
      const auto &band = std::get<BandlimitStep>(r.steps[2]);
      const CodecSpec &c = std::get<CodecStep>(r.steps[3]).codec;
      const auto &loss = std::get<PacketLossStep>(r.steps[4]);
      CHECK(std::get<ResampleStep>(r.steps[5]).target_hz == 16000);
      CHECK(loss.prob >= 0.0);
      CHECK(loss.prob <= 0.05);
      CHECK(loss.frame_ms == 20.0);
      CHECK(c.channel_class == ch);
      if (c.bandwidth == BandwidthClass::kNarrowband8k) {
        CHECK(codec_rate == 8000);
        CHECK(band.low_hz == 300.0);
        CHECK(band.high_hz == 3400.0);
      } else {
        CHECK(codec_rate == 16000);
        CHECK(band.low_hz == 50.0);
        CHECK(band.high_hz == 7000.0);
      }
      REQUIRE(c.bitrate_kbps.has_value());
      CHECK(r.seed == s);
      CHECK(r.recipe_id.rfind("la_" + ChannelClassName(ch) + "_", 0) == 0);
    }
  }
  const AugmentationRecipe a = BuildLaRecipe(ChannelClass::kCellular, 77);
  const AugmentationRecipe b = BuildLaRecipe(ChannelClass::kCellular, 77);
  CHECK(RecipeToJson(a) == RecipeToJson(b));
}

TEST_CASE("configured bitrate lists are honoured") {
  LaRecipeOptions opts;
  opts.bitrates[LaCodec::kG726] = {32};
  opts.packet_loss_max = 0.0;
  std::set<double> seen;
  for (uint64_t s = 0; s < 200; ++s) {
    const AugmentationRecipe r = BuildLaRecipe(ChannelClass::kLandline, s, opts);
    const CodecSpec *c = CodecOf(r);
    if (c->name == CodecName::kExternal) CHECK(*c->bitrate_kbps == 32.0);
    else CHECK(*c->bitrate_kbps == 64.0);
    CHECK(std::get<PacketLossStep>(r.steps[4]).prob == 0.0);
  }
  opts.bitrates[LaCodec::kG728] = {};
  CHECK_THROWS_AS(BuildLaRecipe(ChannelClass::kSatellite, 1, opts), UsageError);
}

TEST_CASE("compression recipes and the bitrate grid") {
  CHECK_NOTHROW(BuildDfRecipe(ExternalFormat::kMp3, 16));
  CHECK_NOTHROW(BuildDfRecipe(ExternalFormat::kM4aAac, 64));
  CHECK_THROWS_AS(BuildDfRecipe(ExternalFormat::kM4aAac, 16), UsageError);
  CHECK_NOTHROW(BuildDfRecipe(ExternalFormat::kM4aAac, 16, false));
  CHECK_THROWS_AS(BuildDfRecipe(ExternalFormat::kOpus, 64, false), UsageError);
  const AugmentationRecipe r = BuildDfRecipe(ExternalFormat::kMp3, 96);
  CHECK(r.recipe_id == "df_mp3_96");
  REQUIRE(r.steps.size() == 2);
  const CodecSpec &c = std::get<CodecStep>(r.steps[0]).codec;
  CHECK(c.name == CodecName::kExternal);
  CHECK(*c.external_format == ExternalFormat::kMp3);
  CHECK(*c.bitrate_kbps == 96.0);
  CHECK(std::get<ResampleStep>(r.steps[1]).target_hz == 16000);
  CHECK(DfBitrateGrid().at(ExternalFormat::kMp3) == std::vector<double>{16, 48, 96, 128, 160});
  CHECK(DfBitrateGrid().at(ExternalFormat::kM4aAac) == std::vector<double>{64, 96, 128});
}

TEST_CASE("recipe JSON round trip") {
  for (uint64_t s = 0; s < 50; ++s) {
    const AugmentationRecipe r = BuildLaRecipe(static_cast<ChannelClass>(s % 4), s);
    const nlohmann::json j = RecipeToJson(r);
    CHECK(RecipeToJson(RecipeFromJson(j)) == j);
    CHECK(RecipeToJson(RecipeFromJson(nlohmann::json::parse(j.dump()))) == j);
  }
  const nlohmann::json df = RecipeToJson(BuildDfRecipe(ExternalFormat::kM4aAac, 128));
  CHECK(df["steps"][0]["codec"] == "m4a_aac");
  CHECK(RecipeToJson(RecipeFromJson(df)) == df);
  CHECK_THROWS_AS(RecipeFromJson(nlohmann::json::parse(R"({"steps": []})")), UsageError);
  CHECK_THROWS_AS(RecipeFromJson(nlohmann::json::parse(R"({"steps": [{"type": "reverb"}]})")),
                  UsageError);
  CHECK_THROWS_AS(RecipeFromJson(nlohmann::json::parse(R"({"steps": [{"type": "gain"}]})")),
                  UsageError);
}

TEST_CASE("format names") {
  CHECK(ParseExternalFormat("m4a") == ExternalFormat::kM4aAac);
  CHECK(ParseExternalFormat("aac") == ExternalFormat::kM4aAac);
  CHECK(ParseExternalFormat("ogg") == ExternalFormat::kOggVorbis);
  CHECK(ParseExternalFormat("silk_wb") == ExternalFormat::kSilkWb);
  CHECK(ExternalFormatName(ExternalFormat::kAmrWb) == "amr_wb");
  CHECK_THROWS_AS(ParseExternalFormat("wma"), UsageError);
  CHECK(ParseChannelClass("voip") == ChannelClass::kVoip);
  CHECK_THROWS_AS(ParseChannelClass("fax"), UsageError);
}
